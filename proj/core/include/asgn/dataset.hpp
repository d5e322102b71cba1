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

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "asgn/molgraph.hpp"

namespace asgn {

enum class Pool : std::uint8_t { Labeled, Unlabeled, Validation, Test };

std::string_view to_string(Pool p);

struct SplitSizes {
  std::size_t labeled = 0;
  std::size_t validation = 0;
  std::size_t test = 0;
};

// Sorted, pairwise-disjoint id lists.
struct PoolAssignment {
  std::vector<std::size_t> labeled;
  std::vector<std::size_t> unlabeled;
  std::vector<std::size_t> validation;
  std::vector<std::size_t> test;

  friend bool operator==(const PoolAssignment&, const PoolAssignment&) = default;
};

// Seeded Fisher-Yates shuffle of [0, total); the first `labeled` ids form the
// labeled pool, then validation, then test, the rest unlabeled. Throws
// ConfigError if the sizes exceed `total`.
PoolAssignment split_dataset(std::size_t total, std::uint64_t seed, const SplitSizes& sizes);

// Split manifest: '#' comment lines, then "[labeled]", "[unlabeled]",
// "[validation]", "[test]" sections with one molecule id per line.
void write_manifest(const PoolAssignment& pools, const std::filesystem::path& path,
                    const std::vector<std::string>& comments = {});
PoolAssignment read_manifest(const std::filesystem::path& path);
std::string format_manifest(const PoolAssignment& pools, const std::vector<std::string>& comments = {});

// Molecule store plus the simulated label oracle. Ground-truth labels of
// unlabeled molecules are only reachable through oracle_label, which moves
// the ids into the labeled pool.
class ChemicalDataset {
 public:
  ChemicalDataset(std::vector<MolecularGraph> molecules, std::vector<PropertyVector> truth,
                  AtomVocabulary vocabulary, PropertySchema schema);

  // All *.xyz files under `dir`, sorted by file name; ids follow that order.
  // An empty `vocabulary` is built from a scan of the files.
  static ChemicalDataset load_directory(const std::filesystem::path& dir, std::size_t limit = 0,
                                        const AtomVocabulary& vocabulary = {});

  std::size_t size() const noexcept { return molecules_.size(); }
  const MolecularGraph& molecule(std::size_t id) const { return molecules_.at(id); }
  const std::vector<MolecularGraph>& molecules() const noexcept { return molecules_; }
  const AtomVocabulary& vocabulary() const noexcept { return vocabulary_; }
  const PropertySchema& schema() const noexcept { return schema_; }

  // Installs a pool partition. Labels of labeled, validation and test ids are
  // revealed; everything else is hidden again.
  void assign_pools(const PoolAssignment& pools);
  const PoolAssignment& pools() const noexcept { return pools_; }
  const std::vector<std::size_t>& pool(Pool p) const;
  Pool pool_of(std::size_t id) const { return membership_.at(id); }

  // Moves unlabeled ids into the labeled pool and returns their labels.
  // All ids are checked before anything moves.
  std::vector<PropertyVector> oracle_label(std::span<const std::size_t> ids);

  bool is_revealed(std::size_t id) const { return revealed_.at(id) != 0; }
  // Revealed label; PoolError for hidden ids.
  const PropertyVector& label(std::size_t id) const;

  std::size_t oracle_queries() const noexcept { return oracle_queries_; }
  // Hash over vocabulary, atom types, coordinate bits and truth bits.
  std::uint64_t content_hash() const;

 private:
  void check_partition() const;

  std::vector<MolecularGraph> molecules_;
  std::vector<PropertyVector> truth_;
  AtomVocabulary vocabulary_;
  PropertySchema schema_;
  PoolAssignment pools_;
  std::vector<Pool> membership_;
  std::vector<std::uint8_t> revealed_;
  std::size_t oracle_queries_ = 0;
};

// Per-property mean and population standard deviation (N denominator).
struct NormStats {
  std::vector<double> mean;
  std::vector<double> stddev;

  // `labels` rows are the selected properties of each labeled molecule.
  // Throws NormalizationError for fewer than two rows or a zero-variance
  // column, naming the property.
  static NormStats fit(std::span<const std::vector<double>> labels, std::span<const std::string> names);

  std::size_t size() const noexcept { return mean.size(); }
  std::vector<double> apply(std::span<const double> y) const;
  std::vector<double> invert(std::span<const double> y_norm) const;
};

// Selected properties of a label.
std::vector<double> select_properties(const PropertyVector& v, std::span<const std::size_t> selection);

}  // namespace asgn
