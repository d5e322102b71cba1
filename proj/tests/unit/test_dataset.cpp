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

#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>

#include "asgn/errors.hpp"
#include "helpers.hpp"

namespace asgn {
namespace {

using testing::random_dataset;
using testing::TempDir;

bool is_partition(const PoolAssignment& p, std::size_t total) {
  std::vector<std::size_t> all;
  for (const auto* v : {&p.labeled, &p.unlabeled, &p.validation, &p.test}) all.insert(all.end(), v->begin(), v->end());
  std::sort(all.begin(), all.end());
  if (all.size() != total) return false;
  for (std::size_t i = 0; i < total; ++i) {
    if (all[i] != i) return false;
  }
  return true;
}

TEST(Split, DeterministicForSeed) {
  const auto a = split_dataset(10, 7, {2, 1, 1});
  const auto b = split_dataset(10, 7, {2, 1, 1});
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.labeled.size(), 2u);
  EXPECT_EQ(a.validation.size(), 1u);
  EXPECT_EQ(a.test.size(), 1u);
  EXPECT_EQ(a.unlabeled.size(), 6u);
  EXPECT_TRUE(is_partition(a, 10));
  EXPECT_NE(split_dataset(100, 1, {10, 10, 10}), split_dataset(100, 2, {10, 10, 10}));
}

TEST(Split, OversizedSplitIsAConfigError) {
  EXPECT_THROW(split_dataset(10, 0, {8, 2, 1}), ConfigError);
  EXPECT_NO_THROW(split_dataset(10, 0, {8, 1, 1}));
}

TEST(Manifest, RoundTripsThroughDisk) {
  TempDir dir("manifest");
  const auto p = split_dataset(40, 3, {5, 6, 7});
  write_manifest(p, dir / "m.txt", {"seed 3"});
  EXPECT_EQ(read_manifest(dir / "m.txt"), p);
  const std::string text = format_manifest(p, {"seed 3"});
  EXPECT_EQ(text.rfind("# asgn split manifest v1\n# seed 3\n[labeled]\n", 0), 0u);
}

TEST(Manifest, RejectsStrayLines) {
  TempDir dir("manifest-bad");
  {
    std::ofstream(dir / "a.txt") << "3\n[labeled]\n1\n";
    std::ofstream(dir / "b.txt") << "[labeled]\n1x\n";
  }
  EXPECT_THROW(read_manifest(dir / "a.txt"), ParseError);
  EXPECT_THROW(read_manifest(dir / "b.txt"), ParseError);
  EXPECT_THROW(read_manifest(dir / "missing.txt"), IoError);
}

TEST(Oracle, RepeatQueryIsAPoolViolation) {
  RngStream rng(1);
  auto data = random_dataset(10, rng);
  PoolAssignment p;
  p.labeled = {0, 1};
  p.validation = {2};
  p.test = {3};
  p.unlabeled = {4, 5, 6, 7, 8, 9};
  data.assign_pools(p);
  const std::vector<std::size_t> q{5};
  data.oracle_label(q);
  EXPECT_THROW(data.oracle_label(q), PoolError);
  const std::vector<std::size_t> test_id{3};
  EXPECT_THROW(data.oracle_label(test_id), PoolError);
  const std::vector<std::size_t> dup{6, 6};
  EXPECT_THROW(data.oracle_label(dup), PoolError);
  // Nothing moved on the failed calls.
  EXPECT_EQ(data.pool(Pool::Unlabeled), (std::vector<std::size_t>{4, 6, 7, 8, 9}));
}

TEST(Oracle, QueriesGrowLabeledPoolAndReturnTruth) {
  RngStream rng(2), same(2);
  auto data = random_dataset(12, rng);
  // Same generator stream, every label revealed: the truth table.
  auto truth = random_dataset(12, same);
  PoolAssignment all;
  for (std::size_t i = 0; i < 12; ++i) all.labeled.push_back(i);
  truth.assign_pools(all);

  data.assign_pools(split_dataset(12, 0, {3, 2, 2}));
  const auto unl = data.pool(Pool::Unlabeled);
  const std::vector<std::size_t> q{unl[0], unl[2], unl[3]};
  EXPECT_FALSE(data.is_revealed(q[0]));
  EXPECT_THROW(data.label(q[0]), PoolError);
  const auto labels = data.oracle_label(q);
  EXPECT_EQ(data.pool(Pool::Labeled).size(), 6u);
  EXPECT_EQ(data.oracle_queries(), 3u);
  ASSERT_EQ(labels.size(), 3u);
  for (std::size_t k = 0; k < q.size(); ++k) {
    EXPECT_TRUE(data.is_revealed(q[k]));
    EXPECT_EQ(data.pool_of(q[k]), Pool::Labeled);
    EXPECT_EQ(labels[k], truth.label(q[k]));
  }
}

TEST(Oracle, PartitionHoldsUnderRandomQuerySequences) {
  RngStream rng(4);
  for (int trial = 0; trial < 25; ++trial) {
    auto data = random_dataset(30, rng, 3);
    data.assign_pools(split_dataset(30, static_cast<std::uint64_t>(trial), {3, 4, 5}));
    const auto val = data.pool(Pool::Validation);
    const auto test = data.pool(Pool::Test);
    std::size_t labeled = data.pool(Pool::Labeled).size();
    while (!data.pool(Pool::Unlabeled).empty()) {
      const auto& un = data.pool(Pool::Unlabeled);
      const std::size_t b = 1 + rng.below(std::min<std::size_t>(4, un.size()));
      std::vector<std::size_t> q;
      for (std::size_t idx : rng.sample_without_replacement(un.size(), b)) q.push_back(un[idx]);
      data.oracle_label(q);
      labeled += b;
      ASSERT_TRUE(is_partition(data.pools(), 30));
      ASSERT_EQ(data.pool(Pool::Labeled).size(), labeled);
      ASSERT_EQ(data.pool(Pool::Validation), val);
      ASSERT_EQ(data.pool(Pool::Test), test);
      for (std::size_t id = 0; id < 30; ++id) {
        ASSERT_EQ(data.is_revealed(id), data.pool_of(id) != Pool::Unlabeled);
      }
    }
  }
}

TEST(Pools, AssignmentValidation) {
  RngStream rng(5);
  auto data = random_dataset(5, rng);
  PoolAssignment overlap{{0, 1}, {1, 2}, {3}, {4}};
  EXPECT_THROW(data.assign_pools(overlap), PoolError);
  PoolAssignment missing{{0}, {1, 2}, {3}, {}};
  EXPECT_THROW(data.assign_pools(missing), PoolError);
  PoolAssignment out_of_range{{0}, {1, 2, 9}, {3}, {4}};
  EXPECT_THROW(data.assign_pools(out_of_range), PoolError);
}

TEST(Dataset, ContentHashTracksCoordinates) {
  RngStream a(6), b(6), c(7);
  EXPECT_EQ(random_dataset(8, a).content_hash(), random_dataset(8, b).content_hash());
  RngStream d(6);
  EXPECT_NE(random_dataset(8, d).content_hash(), random_dataset(8, c).content_hash());
}

TEST(Dataset, LoadDirectorySortsFilesAndBuildsVocabulary) {
  TempDir dir("load");
  SynthOptions o;
  o.count = 12;
  o.seed = 3;
  ASSERT_EQ(write_synthetic_dataset(o, dir.path()), 12u);
  const auto data = ChemicalDataset::load_directory(dir.path());
  EXPECT_EQ(data.size(), 12u);
  EXPECT_EQ(data.molecule(0).name, "dsgdb9nsd_000001");
  EXPECT_EQ(data.molecule(11).name, "dsgdb9nsd_000012");
  const auto limited = ChemicalDataset::load_directory(dir.path(), 5);
  EXPECT_EQ(limited.size(), 5u);
  EXPECT_THROW(ChemicalDataset::load_directory(dir / "nope"), IoError);
}

TEST(NormStats, TwoPointStatistics) {
  const std::vector<std::vector<double>> rows{{1.0}, {3.0}};
  const std::vector<std::string> names{"homo"};
  const auto s = NormStats::fit(rows, names);
  EXPECT_DOUBLE_EQ(s.mean[0], 2.0);
  EXPECT_DOUBLE_EQ(s.stddev[0], 1.0);
  const std::vector<double> y{3.0};
  EXPECT_DOUBLE_EQ(s.apply(y)[0], 1.0);
}

TEST(NormStats, ConstantColumnIsAnError) {
  const std::vector<std::vector<double>> rows{{2.0, 1.0}, {2.0, 5.0}};
  const std::vector<std::string> names{"homo", "lumo"};
  try {
    NormStats::fit(rows, names);
    FAIL() << "expected a normalization error";
  } catch (const NormalizationError& e) {
    EXPECT_NE(std::string(e.what()).find("homo"), std::string::npos);
  }
  const std::vector<std::vector<double>> one{{1.0}};
  EXPECT_THROW(NormStats::fit(one, names), NormalizationError);
}

TEST(NormStats, InvertUndoesApply) {
  RngStream rng(12);
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < 50; ++i) rows.push_back({rng.normal() * 3 + 1, rng.normal() * 0.01 - 0.2});
  const std::vector<std::string> names{"a", "b"};
  const auto s = NormStats::fit(rows, names);
  for (int i = 0; i < 100; ++i) {
    const std::vector<double> y{rng.normal() * 5, rng.normal()};
    const auto back = s.invert(s.apply(y));
    EXPECT_NEAR(back[0], y[0], 1e-12);
    EXPECT_NEAR(back[1], y[1], 1e-12);
  }
}

TEST(NormStats, SelectProperties) {
  PropertyVector v;
  v.values = {0, 1, 2, 3, 4};
  const std::vector<std::size_t> sel{4, 1};
  EXPECT_EQ(select_properties(v, sel), (std::vector<double>{4, 1}));
}

}  // namespace
}  // namespace asgn
