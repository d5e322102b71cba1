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

#include "asgn/dataset.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "asgn/errors.hpp"
#include "asgn/rng.hpp"

namespace asgn {

std::string_view to_string(Pool p) {
  switch (p) {
    case Pool::Labeled:
      return "labeled";
    case Pool::Unlabeled:
      return "unlabeled";
    case Pool::Validation:
      return "validation";
    case Pool::Test:
      return "test";
  }
  return "?";
}

PoolAssignment split_dataset(std::size_t total, std::uint64_t seed, const SplitSizes& sizes) {
  const std::size_t want = sizes.labeled + sizes.validation + sizes.test;
  if (want > total) {
    throw ConfigError("split sizes " + std::to_string(sizes.labeled) + "/" + std::to_string(sizes.validation) +
                      "/" + std::to_string(sizes.test) + " need " + std::to_string(want) +
                      " molecules but the dataset has " + std::to_string(total));
  }
  std::vector<std::size_t> order(total);
  std::iota(order.begin(), order.end(), std::size_t{0});
  RngStream rng = RngStream(seed).fork("split");
  rng.shuffle(std::span<std::size_t>(order));

  PoolAssignment p;
  auto take = [&](std::size_t from, std::size_t count) {
    std::vector<std::size_t> ids(order.begin() + static_cast<std::ptrdiff_t>(from),
                                 order.begin() + static_cast<std::ptrdiff_t>(from + count));
    std::sort(ids.begin(), ids.end());
    return ids;
  };
  std::size_t at = 0;
  p.labeled = take(at, sizes.labeled);
  at += sizes.labeled;
  p.validation = take(at, sizes.validation);
  at += sizes.validation;
  p.test = take(at, sizes.test);
  at += sizes.test;
  p.unlabeled = take(at, total - at);
  return p;
}

std::string format_manifest(const PoolAssignment& pools, const std::vector<std::string>& comments) {
  std::ostringstream out;
  out << "# asgn split manifest v1\n";
  for (const auto& c : comments) out << "# " << c << '\n';
  auto section = [&out](const char* name, const std::vector<std::size_t>& ids) {
    out << '[' << name << "]\n";
    for (std::size_t id : ids) out << id << '\n';
  };
  section("labeled", pools.labeled);
  section("validation", pools.validation);
  section("test", pools.test);
  section("unlabeled", pools.unlabeled);
  return out.str();
}

void write_manifest(const PoolAssignment& pools, const std::filesystem::path& path,
                    const std::vector<std::string>& comments) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write manifest " + path.string());
  out << format_manifest(pools, comments);
  if (!out) throw IoError("failed writing manifest " + path.string());
}

PoolAssignment read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest " + path.string());
  PoolAssignment p;
  std::vector<std::size_t>* current = nullptr;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (line == "[labeled]") {
      current = &p.labeled;
    } else if (line == "[unlabeled]") {
      current = &p.unlabeled;
    } else if (line == "[validation]") {
      current = &p.validation;
    } else if (line == "[test]") {
      current = &p.test;
    } else {
      if (current == nullptr) throw ParseError(path.string(), line_no, "id before any [section] header");
      std::size_t id = 0;
      std::istringstream ls(line);
      if (!(ls >> id) || !(ls >> std::ws).eof()) {
        throw ParseError(path.string(), line_no, "expected a molecule id, got '" + line + "'");
      }
      current->push_back(id);
    }
  }
  for (auto* v : {&p.labeled, &p.unlabeled, &p.validation, &p.test}) std::sort(v->begin(), v->end());
  return p;
}

ChemicalDataset::ChemicalDataset(std::vector<MolecularGraph> molecules, std::vector<PropertyVector> truth,
                                 AtomVocabulary vocabulary, PropertySchema schema)
    : molecules_(std::move(molecules)),
      truth_(std::move(truth)),
      vocabulary_(std::move(vocabulary)),
      schema_(std::move(schema)),
      membership_(molecules_.size(), Pool::Unlabeled),
      revealed_(molecules_.size(), 0) {
  if (truth_.size() != molecules_.size()) throw ConfigError("dataset: molecule and label counts differ");
  for (std::size_t i = 0; i < molecules_.size(); ++i) {
    if (molecules_[i].id != i) throw ConfigError("dataset: molecule ids must equal their position");
    if (truth_[i].values.size() != schema_.size()) {
      throw ConfigError("dataset: molecule " + std::to_string(i) + " has " +
                        std::to_string(truth_[i].values.size()) + " properties, schema declares " +
                        std::to_string(schema_.size()));
    }
    for (double v : truth_[i].values) {
      if (!std::isfinite(v)) throw ConfigError("dataset: non-finite property for molecule " + std::to_string(i));
    }
    for (int t : molecules_[i].atom_types) {
      if (t < 0 || static_cast<std::size_t>(t) >= vocabulary_.size()) {
        throw ConfigError("dataset: atom type code outside vocabulary in molecule " + std::to_string(i));
      }
    }
  }
  pools_.unlabeled.resize(molecules_.size());
  std::iota(pools_.unlabeled.begin(), pools_.unlabeled.end(), std::size_t{0});
}

ChemicalDataset ChemicalDataset::load_directory(const std::filesystem::path& dir, std::size_t limit,
                                                const AtomVocabulary& vocabulary) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw IoError("dataset directory not found: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".xyz") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });
  if (limit > 0 && files.size() > limit) files.resize(limit);
  if (files.empty()) throw IoError("no .xyz files under " + dir.string());

  std::vector<Qm9Record> records;
  records.reserve(files.size());
  std::vector<std::string> symbols;
  for (const auto& f : files) {
    records.push_back(read_qm9_file(f));
    symbols.insert(symbols.end(), records.back().symbols.begin(), records.back().symbols.end());
  }
  AtomVocabulary vocab = vocabulary.size() > 0 ? vocabulary : AtomVocabulary::from_symbols(symbols);

  std::vector<MolecularGraph> mols;
  std::vector<PropertyVector> truth;
  mols.reserve(records.size());
  truth.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    try {
      mols.push_back(make_graph(records[i], vocab, i));
    } catch (const Error& e) {
      throw GeometryError(files[i].string() + ": " + e.what());
    }
    mols.back().name = files[i].stem().string();
    truth.push_back(records[i].properties);
  }
  return ChemicalDataset(std::move(mols), std::move(truth), std::move(vocab), PropertySchema::qm9());
}

void ChemicalDataset::assign_pools(const PoolAssignment& pools) {
  std::vector<int> seen(molecules_.size(), 0);
  std::vector<Pool> membership(molecules_.size(), Pool::Unlabeled);
  auto mark = [&](const std::vector<std::size_t>& ids, Pool p) {
    for (std::size_t id : ids) {
      if (id >= molecules_.size()) {
        throw PoolError("pool " + std::string(to_string(p)) + " names molecule " + std::to_string(id) +
                        " but the dataset has " + std::to_string(molecules_.size()));
      }
      if (seen[id]++) throw PoolError("molecule " + std::to_string(id) + " appears in more than one pool");
      membership[id] = p;
    }
  };
  mark(pools.labeled, Pool::Labeled);
  mark(pools.unlabeled, Pool::Unlabeled);
  mark(pools.validation, Pool::Validation);
  mark(pools.test, Pool::Test);
  for (std::size_t id = 0; id < seen.size(); ++id) {
    if (!seen[id]) throw PoolError("molecule " + std::to_string(id) + " is in no pool");
  }
  pools_ = pools;
  for (auto* v : {&pools_.labeled, &pools_.unlabeled, &pools_.validation, &pools_.test}) {
    std::sort(v->begin(), v->end());
  }
  membership_ = std::move(membership);
  for (std::size_t id = 0; id < molecules_.size(); ++id) {
    revealed_[id] = membership_[id] != Pool::Unlabeled ? 1 : 0;
  }
  check_partition();
}

const std::vector<std::size_t>& ChemicalDataset::pool(Pool p) const {
  switch (p) {
    case Pool::Labeled:
      return pools_.labeled;
    case Pool::Unlabeled:
      return pools_.unlabeled;
    case Pool::Validation:
      return pools_.validation;
    case Pool::Test:
      return pools_.test;
  }
  throw PoolError("unknown pool");
}

std::vector<PropertyVector> ChemicalDataset::oracle_label(std::span<const std::size_t> ids) {
  std::vector<std::size_t> sorted(ids.begin(), ids.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw PoolError("oracle_label: duplicate id in query");
  }
  for (std::size_t id : ids) {
    if (id >= molecules_.size() || membership_[id] != Pool::Unlabeled) {
      throw PoolError("oracle_label: molecule " + std::to_string(id) + " is not in the unlabeled pool");
    }
  }
  std::vector<PropertyVector> out;
  out.reserve(ids.size());
  for (std::size_t id : ids) {
    membership_[id] = Pool::Labeled;
    revealed_[id] = 1;
    out.push_back(truth_[id]);
  }
  auto& un = pools_.unlabeled;
  un.erase(std::remove_if(un.begin(), un.end(), [this](std::size_t id) { return membership_[id] != Pool::Unlabeled; }),
           un.end());
  pools_.labeled.insert(pools_.labeled.end(), ids.begin(), ids.end());
  std::sort(pools_.labeled.begin(), pools_.labeled.end());
  oracle_queries_ += ids.size();
  return out;
}

const PropertyVector& ChemicalDataset::label(std::size_t id) const {
  if (id >= molecules_.size() || !revealed_[id]) {
    throw PoolError("label of molecule " + std::to_string(id) + " has not been revealed");
  }
  return truth_[id];
}

std::uint64_t ChemicalDataset::content_hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& s : vocabulary_.symbols()) h = fnv1a64(s, h);
  for (std::size_t i = 0; i < molecules_.size(); ++i) {
    for (int t : molecules_[i].atom_types) mix(static_cast<std::uint64_t>(t));
    for (const auto& r : molecules_[i].coordinates) {
      for (double c : r) mix(std::bit_cast<std::uint64_t>(c));
    }
    for (double v : truth_[i].values) mix(std::bit_cast<std::uint64_t>(v));
  }
  return h;
}

void ChemicalDataset::check_partition() const {
  const std::size_t total =
      pools_.labeled.size() + pools_.unlabeled.size() + pools_.validation.size() + pools_.test.size();
  if (total != molecules_.size()) throw PoolError("pools do not cover the dataset");
}

NormStats NormStats::fit(std::span<const std::vector<double>> labels, std::span<const std::string> names) {
  if (labels.size() < 2) throw NormalizationError("need at least two labeled molecules to normalize targets");
  const std::size_t m = labels.front().size();
  NormStats s;
  s.mean.assign(m, 0.0);
  s.stddev.assign(m, 0.0);
  const double n = static_cast<double>(labels.size());
  for (const auto& row : labels) {
    if (row.size() != m) throw NormalizationError("ragged label rows");
    for (std::size_t k = 0; k < m; ++k) s.mean[k] += row[k];
  }
  for (double& v : s.mean) v /= n;
  for (const auto& row : labels) {
    for (std::size_t k = 0; k < m; ++k) {
      const double d = row[k] - s.mean[k];
      s.stddev[k] += d * d;
    }
  }
  for (std::size_t k = 0; k < m; ++k) {
    s.stddev[k] = std::sqrt(s.stddev[k] / n);
    if (!(s.stddev[k] > 0.0)) {
      const std::string name = k < names.size() ? names[k] : "#" + std::to_string(k);
      throw NormalizationError("property '" + name + "' has zero variance over the labeled pool");
    }
  }
  return s;
}

std::vector<double> NormStats::apply(std::span<const double> y) const {
  std::vector<double> out(y.size());
  for (std::size_t k = 0; k < y.size(); ++k) out[k] = (y[k] - mean[k]) / stddev[k];
  return out;
}

std::vector<double> NormStats::invert(std::span<const double> y_norm) const {
  std::vector<double> out(y_norm.size());
  for (std::size_t k = 0; k < y_norm.size(); ++k) out[k] = y_norm[k] * stddev[k] + mean[k];
  return out;
}

std::vector<double> select_properties(const PropertyVector& v, std::span<const std::size_t> selection) {
  std::vector<double> out;
  out.reserve(selection.size());
  for (std::size_t k : selection) out.push_back(v.values.at(k));
  return out;
}

}  // namespace asgn
