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

#include <unistd.h>

#include <filesystem>
#include <string>
#include <vector>

#include "asgn/dataset.hpp"
#include "asgn/gradsuite.hpp"
#include "asgn/synth.hpp"

namespace asgn::testing {

// In-memory dataset built from generated QM9-style records.
inline ChemicalDataset synthetic_dataset(std::size_t count, std::uint64_t seed, std::size_t max_heavy = 6) {
  SynthOptions o;
  o.count = count;
  o.seed = seed;
  o.max_heavy = max_heavy;
  const auto records = synthesize_qm9(o);
  const AtomVocabulary vocab = AtomVocabulary::qm9();
  std::vector<MolecularGraph> mols;
  std::vector<PropertyVector> truth;
  for (std::size_t i = 0; i < records.size(); ++i) {
    mols.push_back(make_graph(records[i], vocab, i));
    truth.push_back(records[i].properties);
  }
  return ChemicalDataset(std::move(mols), std::move(truth), vocab, PropertySchema::qm9());
}

// Small random molecules with labels drawn from `rng`; property k of
// molecule i is (i + 1) * (k + 1) / 10 plus noise.
inline ChemicalDataset random_dataset(std::size_t count, RngStream& rng, std::size_t max_atoms = 5) {
  std::vector<MolecularGraph> mols;
  std::vector<PropertyVector> truth;
  for (std::size_t i = 0; i < count; ++i) {
    MolecularGraph g = random_molecule(rng, max_atoms, 5);
    g.id = i;
    g.name = "m" + std::to_string(i);
    mols.push_back(std::move(g));
    PropertyVector p;
    for (std::size_t k = 0; k < kQm9PropertyCount; ++k) {
      p.values.push_back(static_cast<double>((i + 1) * (k + 1)) / 10.0 + 0.01 * rng.normal());
    }
    truth.push_back(std::move(p));
  }
  return ChemicalDataset(std::move(mols), std::move(truth), AtomVocabulary::qm9(), PropertySchema::qm9());
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("asgn-test-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace asgn::testing
