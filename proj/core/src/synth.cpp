// Copyright 2026 The ASGN Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "asgn/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "asgn/errors.hpp"
#include "asgn/rng.hpp"

namespace asgn {

namespace {

enum Heavy { kC = 0, kN = 1, kO = 2, kF = 3 };

constexpr std::array<const char*, 4> kSymbol{"C", "N", "O", "F"};
constexpr std::array<int, 4> kValence{4, 3, 2, 1};
constexpr std::array<double, 4> kRadius{0.76, 0.71, 0.66, 0.64};
constexpr std::array<double, 4> kHBond{1.09, 1.01, 0.96, 0.92};
constexpr std::array<double, 4> kMass{12.011, 14.007, 15.999, 18.998};
constexpr double kHMass = 1.008;

// Composition families: element weights (C, N, O, F) and relative frequency.
struct Family {
  std::array<double, 4> mix;
  double weight;
};
constexpr std::array<Family, 8> kFamilies{{
    {{1.0, 0.0, 0.0, 0.0}, 1.00},
    {{0.7, 0.0, 0.3, 0.0}, 0.45},
    {{0.7, 0.3, 0.0, 0.0}, 0.30},
    {{0.6, 0.2, 0.2, 0.0}, 0.20},
    {{0.6, 0.0, 0.0, 0.4}, 0.12},
    {{0.4, 0.4, 0.2, 0.0}, 0.09},
    {{0.4, 0.0, 0.5, 0.1}, 0.07},
    {{0.3, 0.3, 0.2, 0.2}, 0.05},
}};

// Base orbital energy (Hartree) of a lone-pair / sigma level on each element.
constexpr std::array<double, 4> kOrbital{-0.300, -0.235, -0.255, -0.420};
// Shift an attached neighbour of each kind applies to an atom's level.
constexpr std::array<double, 4> kNeighbourShift{0.012, 0.006, -0.010, -0.022};
constexpr double kHydrogenShift = 0.004;

struct Atom {
  int element;  // 0..3 heavy, -1 hydrogen
  Vec3 pos;
  int free;     // remaining valence
};

Vec3 random_direction(RngStream& rng) {
  while (true) {
    const double x = rng.uniform(-1.0, 1.0), y = rng.uniform(-1.0, 1.0), z = rng.uniform(-1.0, 1.0);
    const double n = std::sqrt(x * x + y * y + z * z);
    if (n > 0.1 && n <= 1.0) return {x / n, y / n, z / n};
  }
}

bool clear_of(const std::vector<Atom>& atoms, const Vec3& p, double min_dist, std::size_t skip) {
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (i == skip) continue;
    if (distance(atoms[i].pos, p) < min_dist) return false;
  }
  return true;
}

int draw_element(const Family& f, RngStream& rng) {
  double u = rng.uniform() * (f.mix[0] + f.mix[1] + f.mix[2] + f.mix[3]);
  for (int e = 0; e < 4; ++e) {
    if (u < f.mix[e]) return e;
    u -= f.mix[e];
  }
  return kC;
}

std::size_t draw_family(RngStream& rng) {
  double total = 0.0;
  for (const auto& f : kFamilies) total += f.weight;
  double u = rng.uniform() * total;
  for (std::size_t k = 0; k < kFamilies.size(); ++k) {
    if (u < kFamilies[k].weight) return k;
    u -= kFamilies[k].weight;
  }
  return 0;
}

// Heavy-atom tree; falls back to carbon when the drawn element cannot bond.
std::vector<Atom> grow_skeleton(std::size_t heavy, const Family& fam, RngStream& rng) {
  std::vector<Atom> atoms;
  int first = draw_element(fam, rng);
  if (heavy > 1 && first == kF) first = kC;
  atoms.push_back({first, {0.0, 0.0, 0.0}, kValence[first]});
  for (std::size_t k = 1; k < heavy; ++k) {
    std::vector<std::size_t> open;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      if (atoms[i].free > 0) open.push_back(i);
    }
    if (open.empty()) break;
    int e = draw_element(fam, rng);
    // Keep the tree growable: a terminal atom may not take the last open slot
    // while atoms remain to be placed.
    if (kValence[e] == 1 && open.size() == 1 && atoms[open[0]].free == 1 && k + 1 < heavy) e = kC;
    bool placed = false;
    for (int attempt = 0; attempt < 60 && !placed; ++attempt) {
      const std::size_t parent = open[rng.below(open.size())];
      const double len = kRadius[atoms[parent].element] + kRadius[e] + rng.uniform(-0.03, 0.03);
      const Vec3 dir = random_direction(rng);
      const Vec3& pp = atoms[parent].pos;
      const Vec3 p{pp[0] + len * dir[0], pp[1] + len * dir[1], pp[2] + len * dir[2]};
      if (!clear_of(atoms, p, 1.9, parent)) continue;
      atoms[parent].free -= 1;
      atoms.push_back({e, p, kValence[e] - 1});
      placed = true;
    }
    if (!placed) break;
  }
  return atoms;
}

void add_hydrogens(std::vector<Atom>& atoms, RngStream& rng) {
  const std::size_t heavy = atoms.size();
  for (std::size_t i = 0; i < heavy; ++i) {
    while (atoms[i].free > 0) {
      bool placed = false;
      for (int attempt = 0; attempt < 80 && !placed; ++attempt) {
        const Vec3 dir = random_direction(rng);
        const double len = kHBond[atoms[i].element] + rng.uniform(-0.01, 0.01);
        const Vec3& c = atoms[i].pos;
        const Vec3 p{c[0] + len * dir[0], c[1] + len * dir[1], c[2] + len * dir[2]};
        if (!clear_of(atoms, p, 1.45, i)) continue;
        atoms.push_back({-1, p, 0});
        placed = true;
      }
      atoms[i].free -= 1;  // a crowded site simply stays unsaturated
    }
  }
}

double smooth_max(const std::vector<double>& xs, double tau) {
  const double m = *std::max_element(xs.begin(), xs.end());
  double s = 0.0;
  for (double x : xs) s += std::exp((x - m) / tau);
  return m + tau * std::log(s);
}

// Eigenvalues of a symmetric 3x3 matrix (closed form).
std::array<double, 3> sym3_eigenvalues(const std::array<std::array<double, 3>, 3>& a) {
  const double p1 = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
  const double q = (a[0][0] + a[1][1] + a[2][2]) / 3.0;
  if (p1 < 1e-18) {
    std::array<double, 3> e{a[0][0], a[1][1], a[2][2]};
    std::sort(e.begin(), e.end());
    return e;
  }
  const double p2 = (a[0][0] - q) * (a[0][0] - q) + (a[1][1] - q) * (a[1][1] - q) + (a[2][2] - q) * (a[2][2] - q) + 2 * p1;
  const double p = std::sqrt(p2 / 6.0);
  std::array<std::array<double, 3>, 3> b{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) b[i][j] = (a[i][j] - (i == j ? q : 0.0)) / p;
  const double det = b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1]) - b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0]) +
                     b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
  const double r = std::clamp(det / 2.0, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  const double pi = std::acos(-1.0);
  const double e1 = q + 2 * p * std::cos(phi);
  const double e3 = q + 2 * p * std::cos(phi + 2 * pi / 3);
  const double e2 = 3 * q - e1 - e3;
  std::array<double, 3> e{e1, e2, e3};
  std::sort(e.begin(), e.end());
  return e;
}

Qm9Record make_record(const std::vector<Atom>& atoms, long index, double noise_homo, double noise_lumo) {
  Qm9Record r;
  r.tag = "gdb";
  r.index = index;
  const std::size_t n = atoms.size();
  std::vector<double> mass(n);
  std::size_t heavy = 0, hydrogens = 0;
  for (std::size_t i = 0; i < n; ++i) {
    r.symbols.emplace_back(atoms[i].element < 0 ? "H" : kSymbol[atoms[i].element]);
    r.coordinates.push_back(atoms[i].pos);
    mass[i] = atoms[i].element < 0 ? kHMass : kMass[atoms[i].element];
    (atoms[i].element < 0 ? hydrogens : heavy) += 1;
  }

  // Local-environment orbital levels of heavy atoms.
  std::vector<double> levels;
  std::vector<double> charges(n, 0.0);
  std::size_t bonds = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (atoms[i].element < 0) continue;
    double e = kOrbital[atoms[i].element];
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double d = distance(atoms[i].pos, atoms[j].pos);
      const double w = std::exp(-(d - 1.45) * (d - 1.45) / 0.08);
      const double far = 0.004 * std::exp(-(d - 2.5) * (d - 2.5) / 0.3);
      if (atoms[j].element < 0) {
        e += kHydrogenShift * std::exp(-(d - 1.05) * (d - 1.05) / 0.02);
      } else {
        e += kNeighbourShift[atoms[j].element] * w + far * (atoms[j].element == kC ? 1.0 : -0.5);
        if (j > i && d < 1.8) ++bonds;
      }
    }
    levels.push_back(e);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (atoms[i].element < 0) {
      charges[i] = 0.12;
    } else {
      charges[i] = -0.12 * static_cast<double>(kValence[atoms[i].element]) + 0.05 * atoms[i].element;
    }
  }
  double qsum = 0.0;
  for (double q : charges) qsum += q;
  for (double& q : charges) q -= qsum / static_cast<double>(n);
  r.charges = charges;

  const double homo = smooth_max(levels, 0.01) + 0.002 * static_cast<double>(heavy) + noise_homo;
  std::vector<double> neg(levels.size());
  for (std::size_t k = 0; k < levels.size(); ++k) neg[k] = -(levels[k] + 0.33);
  const double lumo = -smooth_max(neg, 0.02) + 0.35 - 0.004 * static_cast<double>(heavy) + noise_lumo;

  double mtot = 0.0;
  Vec3 com{0, 0, 0};
  for (std::size_t i = 0; i < n; ++i) {
    mtot += mass[i];
    for (int c = 0; c < 3; ++c) com[c] += mass[i] * atoms[i].pos[c];
  }
  for (double& c : com) c /= mtot;
  std::array<std::array<double, 3>, 3> inertia{};
  double r2 = 0.0;
  Vec3 dipole{0, 0, 0};
  for (std::size_t i = 0; i < n; ++i) {
    const double x = atoms[i].pos[0] - com[0], y = atoms[i].pos[1] - com[1], z = atoms[i].pos[2] - com[2];
    inertia[0][0] += mass[i] * (y * y + z * z);
    inertia[1][1] += mass[i] * (x * x + z * z);
    inertia[2][2] += mass[i] * (x * x + y * y);
    inertia[0][1] -= mass[i] * x * y;
    inertia[0][2] -= mass[i] * x * z;
    inertia[1][2] -= mass[i] * y * z;
    const double zeff = atoms[i].element < 0 ? 1.0 : 6.0 + atoms[i].element;
    r2 += zeff * (x * x + y * y + z * z) / 0.280028;  // bohr^2
    dipole[0] += charges[i] * x;
    dipole[1] += charges[i] * y;
    dipole[2] += charges[i] * z;
  }
  inertia[1][0] = inertia[0][1];
  inertia[2][0] = inertia[0][2];
  inertia[2][1] = inertia[1][2];
  const auto moments = sym3_eigenvalues(inertia);
  auto rot = [](double m) { return m > 1e-6 ? 505379.07 / m : 0.0; };  // GHz from amu A^2
  const double mu = 4.803 * std::sqrt(dipole[0] * dipole[0] + dipole[1] * dipole[1] + dipole[2] * dipole[2]);

  double alpha = 0.0, u0 = 0.0;
  for (const auto& a : atoms) {
    alpha += a.element < 0 ? 4.5 : std::array<double, 4>{11.0, 7.4, 5.4, 3.8}[a.element];
    u0 += a.element < 0 ? -0.5 : std::array<double, 4>{-37.85, -54.59, -75.07, -99.72}[a.element];
  }
  u0 -= 0.11 * static_cast<double>(bonds) + 0.16 * static_cast<double>(hydrogens);
  const double zpve = 0.0105 * static_cast<double>(hydrogens) + 0.0042 * static_cast<double>(bonds);
  const double u = u0 + 0.0038 + 0.0002 * static_cast<double>(n);
  const double h = u + 0.000944;
  const double g = h - 0.026 - 0.0009 * static_cast<double>(n);
  const double cv = 6.0 + 1.55 * static_cast<double>(n) - 0.4 * static_cast<double>(hydrogens);

  r.properties.values = {rot(moments[0]), rot(moments[1]), rot(moments[2]), mu,   alpha, homo, lumo, lumo - homo,
                         r2,              zpve,            u0,              u,    h,     g,    cv};
  return r;
}

}  // namespace

std::vector<Qm9Record> synthesize_qm9(const SynthOptions& opts) {
  if (opts.min_heavy < 1 || opts.max_heavy < opts.min_heavy) throw ConfigError("synthesize: need 1 <= min_heavy <= max_heavy");
  const RngStream root(opts.seed);
  std::vector<Qm9Record> out;
  out.reserve(opts.count);
  for (std::size_t k = 0; k < opts.count; ++k) {
    RngStream rng = root.fork("molecule", k);
    const Family& fam = kFamilies[draw_family(rng)];
    const std::size_t heavy = opts.min_heavy + rng.below(opts.max_heavy - opts.min_heavy + 1);
    std::vector<Atom> atoms = grow_skeleton(heavy, fam, rng);
    add_hydrogens(atoms, rng);
    const double nh = opts.label_noise * rng.normal();
    const double nl = opts.label_noise * rng.normal();
    out.push_back(make_record(atoms, static_cast<long>(k + 1), nh, nl));
  }
  return out;
}

std::size_t write_synthetic_dataset(const SynthOptions& opts, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto records = synthesize_qm9(opts);
  for (const auto& r : records) {
    char name[32];
    std::snprintf(name, sizeof(name), "dsgdb9nsd_%06ld.xyz", r.index);
    std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + (dir / name).string());
    out << write_qm9_xyz(r);
  }
  return records.size();
}

}  // namespace asgn
