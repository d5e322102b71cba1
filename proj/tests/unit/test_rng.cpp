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
#include <set>

#include "asgn/rng.hpp"

namespace asgn {
namespace {

TEST(Rng, EngineMatchesStandardSequence) {
  // The standard requires the 10000th output of a default-seeded
  // mt19937_64 to be this value.
  RngStream r(5489u);
  std::uint64_t x = 0;
  for (int i = 0; i < 10000; ++i) x = r.next_u64();
  EXPECT_EQ(x, 9981545732273789042ULL);
}

TEST(Rng, HashPrimitivesMatchReferenceVectors) {
  EXPECT_EQ(splitmix64(0), 0xe220a8397b1dcdafULL);
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
}

TEST(Rng, ForkIgnoresParentPosition) {
  RngStream a(42);
  RngStream b(42);
  for (int i = 0; i < 17; ++i) b.next_u64();
  RngStream ca = a.fork("teacher", 3);
  RngStream cb = b.fork("teacher", 3);
  for (int i = 0; i < 8; ++i) EXPECT_EQ(ca.next_u64(), cb.next_u64());
}

TEST(Rng, ForksWithDifferentTagsOrIndicesDiffer) {
  RngStream root(7);
  EXPECT_NE(root.fork("a").seed(), root.fork("b").seed());
  EXPECT_NE(root.fork("a", 0).seed(), root.fork("a", 1).seed());
}

TEST(Rng, UniformStaysInUnitInterval) {
  RngStream r(1);
  for (int i = 0; i < 10000; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(Rng, BelowIsRoughlyUniform) {
  RngStream r(3);
  std::vector<int> counts(7, 0);
  const int trials = 70000;
  for (int i = 0; i < trials; ++i) ++counts[r.below(7)];
  for (int c : counts) EXPECT_NEAR(c / static_cast<double>(trials), 1.0 / 7.0, 0.01);
  EXPECT_THROW(r.below(0), std::invalid_argument);
}

TEST(Rng, NormalMomentsAreStandard) {
  RngStream r(11);
  double s = 0.0, s2 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = r.normal();
    s += x;
    s2 += x * x;
  }
  EXPECT_NEAR(s / n, 0.0, 0.01);
  EXPECT_NEAR(s2 / n, 1.0, 0.02);
}

TEST(Rng, SampleWithoutReplacementIsDistinct) {
  RngStream r(9);
  const auto s = r.sample_without_replacement(50, 20);
  ASSERT_EQ(s.size(), 20u);
  EXPECT_EQ(std::set<std::size_t>(s.begin(), s.end()).size(), 20u);
  EXPECT_TRUE(std::all_of(s.begin(), s.end(), [](std::size_t v) { return v < 50; }));
  EXPECT_THROW(r.sample_without_replacement(3, 4), std::invalid_argument);
}

TEST(Rng, ShuffleIsAPermutation) {
  RngStream r(5);
  std::vector<int> v{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  r.shuffle(std::span<int>(v));
  std::vector<int> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  EXPECT_EQ(sorted, (std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9}));
}

}  // namespace
}  // namespace asgn
