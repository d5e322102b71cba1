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

#include "asgn/molgraph.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "asgn/errors.hpp"

namespace asgn {

namespace {

constexpr std::array<std::string_view, 118> kElements = {
    "H",  "He", "Li", "Be", "B",  "C",  "N",  "O",  "F",  "Ne", "Na", "Mg", "Al", "Si", "P",  "S",
    "Cl", "Ar", "K",  "Ca", "Sc", "Ti", "V",  "Cr", "Mn", "Fe", "Co", "Ni", "Cu", "Zn", "Ga", "Ge",
    "As", "Se", "Br", "Kr", "Rb", "Sr", "Y",  "Zr", "Nb", "Mo", "Tc", "Ru", "Rh", "Pd", "Ag", "Cd",
    "In", "Sn", "Sb", "Te", "I",  "Xe", "Cs", "Ba", "La", "Ce", "Pr", "Nd", "Pm", "Sm", "Eu", "Gd",
    "Tb", "Dy", "Ho", "Er", "Tm", "Yb", "Lu", "Hf", "Ta", "W",  "Re", "Os", "Ir", "Pt", "Au", "Hg",
    "Tl", "Pb", "Bi", "Po", "At", "Rn", "Fr", "Ra", "Ac", "Th", "Pa", "U",  "Np", "Pu", "Am", "Cm",
    "Bk", "Cf", "Es", "Fm", "Md", "No", "Lr", "Rf", "Db", "Sg", "Bh", "Hs", "Mt", "Ds", "Rg", "Cn",
    "Nh", "Fl", "Mc", "Lv", "Ts", "Og"};

}  // namespace

double distance(const Vec3& a, const Vec3& b) {
  const double dx = a[0] - b[0];
  const double dy = a[1] - b[1];
  const double dz = a[2] - b[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

std::vector<Edge> build_edges(std::span<const Vec3> coordinates) {
  const std::size_t n = coordinates.size();
  std::vector<Edge> edges;
  edges.reserve(n * (n > 0 ? n - 1 : 0) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = distance(coordinates[i], coordinates[j]);
      if (!std::isfinite(d)) {
        throw GeometryError("non-finite coordinate for atom pair (" + std::to_string(i) + ", " +
                            std::to_string(j) + ")");
      }
      if (d <= 0.0) {
        throw GeometryError("atoms " + std::to_string(i) + " and " + std::to_string(j) +
                            " share identical coordinates");
      }
      edges.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), d});
    }
  }
  return edges;
}

int atomic_number(std::string_view symbol) {
  for (std::size_t z = 0; z < kElements.size(); ++z) {
    if (kElements[z] == symbol) return static_cast<int>(z) + 1;
  }
  return 0;
}

AtomVocabulary::AtomVocabulary(std::vector<std::string> symbols) : symbols_(std::move(symbols)) {
  for (const auto& s : symbols_) {
    if (atomic_number(s) == 0) throw ConfigError("vocabulary contains unknown element '" + s + "'");
  }
}

AtomVocabulary AtomVocabulary::qm9() { return AtomVocabulary({"H", "C", "N", "O", "F"}); }

AtomVocabulary AtomVocabulary::from_symbols(std::span<const std::string> symbols) {
  std::set<std::string> distinct(symbols.begin(), symbols.end());
  std::vector<std::string> ordered(distinct.begin(), distinct.end());
  std::sort(ordered.begin(), ordered.end(),
            [](const std::string& a, const std::string& b) { return atomic_number(a) < atomic_number(b); });
  return AtomVocabulary(std::move(ordered));
}

std::optional<int> AtomVocabulary::find(std::string_view symbol) const {
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    if (symbols_[i] == symbol) return static_cast<int>(i);
  }
  return std::nullopt;
}

int AtomVocabulary::code(std::string_view symbol) const {
  if (auto c = find(symbol)) return *c;
  throw ConfigError("atom type '" + std::string(symbol) + "' is not in the model vocabulary");
}

PropertySchema PropertySchema::qm9() {
  using U = PhysicalUnit;
  return PropertySchema{
      {"A", "B", "C", "mu", "alpha", "homo", "lumo", "gap", "r2", "zpve", "U0", "U", "H", "G", "Cv"},
      {U::GHz, U::GHz, U::GHz, U::Debye, U::Bohr3, U::Hartree, U::Hartree, U::Hartree, U::Bohr2, U::Hartree,
       U::Hartree, U::Hartree, U::Hartree, U::Hartree, U::CalPerMolK}};
}

std::size_t PropertySchema::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return i;
  }
  std::string valid;
  for (const auto& n : names) valid += (valid.empty() ? "" : ", ") + n;
  throw ConfigError("unknown property '" + std::string(name) + "' (valid: " + valid + ")");
}

double PropertySchema::report_scale(std::size_t index) const {
  return units.at(index) == PhysicalUnit::Hartree ? kHartreeToEv : 1.0;
}

std::string PropertySchema::report_unit(std::size_t index) const {
  switch (units.at(index)) {
    case PhysicalUnit::Hartree:
      return "eV";
    case PhysicalUnit::GHz:
      return "GHz";
    case PhysicalUnit::Debye:
      return "D";
    case PhysicalUnit::Bohr3:
      return "bohr^3";
    case PhysicalUnit::Bohr2:
      return "bohr^2";
    case PhysicalUnit::CalPerMolK:
      return "cal/molK";
    case PhysicalUnit::None:
      break;
  }
  return "";
}

MolecularGraph make_graph(const Qm9Record& record, const AtomVocabulary& vocab, std::size_t id) {
  MolecularGraph g;
  g.id = id;
  g.name = record.tag + "_" + std::to_string(record.index);
  g.atom_types.reserve(record.symbols.size());
  for (const auto& s : record.symbols) g.atom_types.push_back(vocab.code(s));
  g.coordinates = record.coordinates;
  g.edges = build_edges(g.coordinates);
  return g;
}

}  // namespace asgn
