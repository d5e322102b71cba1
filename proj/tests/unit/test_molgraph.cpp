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
#include <cmath>

#include "asgn/errors.hpp"
#include "asgn/gradsuite.hpp"
#include "asgn/molgraph.hpp"
#include "oracles.hpp"

namespace asgn {
namespace {

TEST(BuildEdges, ThreeFourFiveTriangle) {
  const std::vector<Vec3> xyz{{0, 0, 0}, {3, 4, 0}};
  const auto edges = build_edges(xyz);
  ASSERT_EQ(edges.size(), 1u);
  EXPECT_EQ(edges[0].i, 0u);
  EXPECT_EQ(edges[0].j, 1u);
  EXPECT_DOUBLE_EQ(edges[0].distance, 5.0);
}

TEST(BuildEdges, ThreeAtomsGiveThreeEdges) {
  const std::vector<Vec3> xyz{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
  EXPECT_EQ(build_edges(xyz).size(), 3u);
}

TEST(BuildEdges, SingleAtomHasNoEdges) {
  const std::vector<Vec3> xyz{{1, 2, 3}};
  EXPECT_TRUE(build_edges(xyz).empty());
}

TEST(BuildEdges, CoincidentAtomsAreRejected) {
  const std::vector<Vec3> xyz{{0, 0, 0}, {1, 1, 1}, {0, 0, 0}};
  EXPECT_THROW(build_edges(xyz), GeometryError);
}

TEST(BuildEdges, CompleteGraphWithExactDistances) {
  RngStream rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const MolecularGraph g = random_molecule(rng, 9, 5);
    const std::size_t n = g.atom_count();
    ASSERT_EQ(g.edges.size(), n * (n - 1) / 2);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j, ++k) {
        const Edge& e = g.edges[k];
        EXPECT_EQ(e.i, i);
        EXPECT_EQ(e.j, j);
        double s = 0.0;
        for (int a = 0; a < 3; ++a) s += std::pow(g.coordinates[i][a] - g.coordinates[j][a], 2);
        EXPECT_GT(e.distance, 0.0);
        EXPECT_NEAR(e.distance, std::sqrt(s), 1e-9);
        EXPECT_DOUBLE_EQ(e.distance, distance(g.coordinates[j], g.coordinates[i]));
      }
    }
    for (int t : g.atom_types) {
      EXPECT_GE(t, 0);
      EXPECT_LT(t, 5);
    }
  }
}

TEST(BuildEdges, PermutationPreservesDistanceMultiset) {
  RngStream rng(8);
  const MolecularGraph g = random_molecule(rng, 7, 5);
  std::vector<std::size_t> perm(g.atom_count());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = perm.size() - 1 - i;
  const MolecularGraph p = oracle::permute_atoms(g, perm);
  std::vector<double> a, b;
  for (const auto& e : g.edges) a.push_back(e.distance);
  for (const auto& e : p.edges) b.push_back(e.distance);
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  EXPECT_EQ(a, b);
}

TEST(Vocabulary, OrderedByAtomicNumber) {
  const std::vector<std::string> seen{"O", "H", "C", "H", "F", "N"};
  const auto v = AtomVocabulary::from_symbols(seen);
  EXPECT_EQ(v, AtomVocabulary::qm9());
  EXPECT_EQ(v.code("C"), 1);
  EXPECT_EQ(v.symbol(3), "O");
  EXPECT_FALSE(v.find("S").has_value());
  EXPECT_THROW(v.code("S"), ConfigError);
  EXPECT_THROW(AtomVocabulary({"H", "Qq"}), ConfigError);
}

TEST(Vocabulary, AtomicNumbers) {
  EXPECT_EQ(atomic_number("H"), 1);
  EXPECT_EQ(atomic_number("C"), 6);
  EXPECT_EQ(atomic_number("F"), 9);
  EXPECT_EQ(atomic_number("Og"), 118);
  EXPECT_EQ(atomic_number("c"), 0);
}

TEST(PropertySchema, Qm9LayoutAndUnits) {
  const auto s = PropertySchema::qm9();
  ASSERT_EQ(s.size(), kQm9PropertyCount);
  EXPECT_EQ(s.index_of("homo"), 5u);
  EXPECT_EQ(s.index_of("Cv"), 14u);
  EXPECT_DOUBLE_EQ(s.report_scale(s.index_of("gap")), 27.211386);
  EXPECT_DOUBLE_EQ(s.report_scale(s.index_of("mu")), 1.0);
  EXPECT_EQ(s.report_unit(s.index_of("homo")), "eV");
  EXPECT_THROW(s.index_of("energy"), ConfigError);
}

TEST(MakeGraph, CodesAndEdges) {
  Qm9Record r;
  r.index = 12;
  r.symbols = {"C", "H", "O"};
  r.coordinates = {{0, 0, 0}, {0, 0, 1.1}, {1.2, 0, 0}};
  r.charges = {0, 0, 0};
  r.properties.values.assign(kQm9PropertyCount, 0.0);
  const auto g = make_graph(r, AtomVocabulary::qm9(), 4);
  EXPECT_EQ(g.id, 4u);
  EXPECT_EQ(g.name, "gdb_12");
  EXPECT_EQ(g.atom_types, (std::vector<int>{1, 0, 3}));
  EXPECT_EQ(g.edges.size(), 3u);
}

}  // namespace
}  // namespace asgn
