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

// Reference implementations used only by the tests. Brute force over speed;
// none of them call the library's transport or selection code.

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "asgn/molgraph.hpp"
#include "asgn/rng.hpp"

namespace asgn::oracle {

// Transport problem with integer marginals (sum of supply == sum of demand).
// The plan is returned as mass fractions (flow / total).
struct TransportSolution {
  std::vector<std::vector<double>> plan;
  double cost = 0.0;  // sum plan_ij cost_ij, with the plan in fractions
};

// Exact LP optimum by successive shortest paths on integer capacities.
TransportSolution min_cost_transport(const std::vector<std::vector<double>>& cost,
                                     const std::vector<long>& supply, const std::vector<long>& demand);

// Exact LP optimum by enumerating every basic solution (spanning trees of the
// bipartite support graph). Exponential; keep N + M small.
TransportSolution vertex_enumeration_transport(const std::vector<std::vector<double>>& cost,
                                               const std::vector<long>& supply, const std::vector<long>& demand);

// N == M with unit marginals: best permutation by enumeration.
double best_assignment_cost(const std::vector<std::vector<double>>& cost);

using Points = std::vector<std::vector<double>>;

// Greedy k-center recomputing every min distance from scratch each step.
// Ties go to the lowest index. `labeled` and `unlabeled` index into points.
struct GreedyPick {
  std::vector<std::size_t> order;
  std::vector<double> radii;
};
GreedyPick brute_force_greedy(const Points& points, const std::vector<std::size_t>& labeled,
                              const std::vector<std::size_t>& unlabeled, std::size_t b);

// max over unlabeled points of the distance to the nearest center.
double coverage_radius(const Points& points, const std::vector<std::size_t>& centers,
                       const std::vector<std::size_t>& unlabeled);

// min over every b-subset S of unlabeled of coverage_radius(labeled + S).
double optimal_k_center_radius(const Points& points, const std::vector<std::size_t>& labeled,
                               const std::vector<std::size_t>& unlabeled, std::size_t b);

// Proper rotation from a random unit quaternion.
std::array<std::array<double, 3>, 3> random_rotation(RngStream& rng);

MolecularGraph rigid_motion(const MolecularGraph& g, const std::array<std::array<double, 3>, 3>& rot,
                            const Vec3& shift);

// Atom i of the result is atom perm[i] of the input; edges are rebuilt.
MolecularGraph permute_atoms(const MolecularGraph& g, const std::vector<std::size_t>& perm);

// Two copies of g, the second shifted by `offset`.
MolecularGraph disjoint_double(const MolecularGraph& g, const Vec3& offset);

}  // namespace asgn::oracle
