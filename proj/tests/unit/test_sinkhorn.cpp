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

#include <cmath>

#include "asgn/errors.hpp"
#include "asgn/gradcheck.hpp"
#include "asgn/ssl.hpp"
#include "oracles.hpp"

namespace asgn {
namespace {

Tensor2 random_log_q(std::size_t n, std::size_t m, RngStream& rng, double scale = 1.0) {
  Tensor2 z(n, m);
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = scale * rng.normal();
  return log_softmax(z);
}

std::vector<std::vector<double>> cost_of(const Tensor2& log_q) {
  std::vector<std::vector<double>> c(log_q.rows(), std::vector<double>(log_q.cols()));
  for (std::size_t i = 0; i < log_q.rows(); ++i) {
    for (std::size_t j = 0; j < log_q.cols(); ++j) c[i][j] = -log_q(i, j);
  }
  return c;
}

std::vector<double> fractions(const std::vector<long>& w) {
  long s = 0;
  for (long v : w) s += v;
  std::vector<double> out;
  for (long v : w) out.push_back(static_cast<double>(v) / static_cast<double>(s));
  return out;
}

// Default lambda and tolerance with room for the slow instances; at
// lambda 25 a wide kernel can need several thousand sweeps.
SinkhornOptions patient() {
  SinkhornOptions o;
  o.max_sweeps = 100000;
  return o;
}

double total_variation(const Tensor2& plan, const std::vector<std::vector<double>>& ref) {
  double tv = 0.0;
  for (std::size_t i = 0; i < plan.rows(); ++i) {
    for (std::size_t j = 0; j < plan.cols(); ++j) tv += std::abs(plan(i, j) - ref[i][j]);
  }
  return 0.5 * tv;
}

TEST(Sinkhorn, UniformSquareIsUniformPlan) {
  for (std::size_t n : {1u, 3u, 7u}) {
    const Tensor2 log_q(n, n, -std::log(static_cast<double>(n)));
    const auto p = sinkhorn_plan_uniform(log_q, SinkhornOptions{});
    for (double v : p.plan.values()) EXPECT_NEAR(v, 1.0 / static_cast<double>(n * n), 1e-15);
    EXPECT_TRUE(p.converged);
  }
}

TEST(Sinkhorn, ThreeByTwoMatchesLinearProgram) {
  // The LP optimum comes from the min-cost-flow oracle; the plan
  // must agree in total variation at lambda = 200.
  RngStream rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Tensor2 log_q = random_log_q(3, 2, rng, 2.0);
    const std::vector<long> supply{2, 2, 2}, demand{3, 3};
    const auto lp = oracle::min_cost_transport(cost_of(log_q), supply, demand);
    SinkhornOptions o;
    o.lambda = 200.0;
    o.max_sweeps = 100000;
    const auto p = sinkhorn_plan(log_q, fractions(supply), fractions(demand), o);
    EXPECT_LT(total_variation(p.plan, lp.plan), 1e-3) << "trial " << trial;
    EXPECT_NEAR(transport_cost(p.plan, log_q), lp.cost, 1e-3);
  }
}

TEST(Sinkhorn, MarginalResidualsOnRandomInstances) {
  RngStream rng(4);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 1 + rng.below(50);
    const std::size_t m = 1 + rng.below(10);
    const Tensor2 log_q = random_log_q(n, m, rng);
    std::vector<double> r(n), c(m);
    double sr = 0.0, sc = 0.0;
    for (double& v : r) sr += (v = 0.5 + rng.uniform());
    for (double& v : c) sc += (v = 0.5 + rng.uniform());
    for (double& v : r) v /= sr;
    for (double& v : c) v /= sc;
    const auto p = sinkhorn_plan(log_q, r, c, patient());
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < m; ++j) s += p.plan(i, j);
      EXPECT_LT(std::abs(s - r[i]), 1e-6);
    }
    for (std::size_t j = 0; j < m; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += p.plan(i, j);
      EXPECT_LT(std::abs(s - c[j]), 1e-6);
    }
    EXPECT_LT(p.row_residual, 1e-6);
    EXPECT_LT(p.col_residual, 1e-6);
  }
}

TEST(Sinkhorn, PeakedPredictionsStillBalance) {
  // Kernel entries far below the double range must not break the scaling.
  RngStream rng(5);
  const Tensor2 log_q = random_log_q(40, 8, rng, 30.0);
  const auto p = sinkhorn_solve(log_q, std::vector<double>(40, 1.0 / 40), std::vector<double>(8, 1.0 / 8),
                                SinkhornOptions{});
  EXPECT_TRUE(p.plan.all_finite());
  EXPECT_LT(p.col_residual, 1e-9);
}

TEST(Sinkhorn, ReportsNonConvergence) {
  RngStream rng(6);
  const Tensor2 log_q = random_log_q(30, 5, rng, 3.0);
  SinkhornOptions o;
  o.max_sweeps = 1;
  EXPECT_THROW(sinkhorn_plan_uniform(log_q, o), ConvergenceError);
  const auto p = sinkhorn_solve(log_q, std::vector<double>(30, 1.0 / 30), std::vector<double>(5, 0.2), o);
  EXPECT_FALSE(p.converged);
  EXPECT_EQ(p.sweeps, 1u);
}

TEST(Sinkhorn, InputValidation) {
  const Tensor2 log_q(2, 2, std::log(0.5));
  const std::vector<double> r{0.5, 0.5}, c3{0.3, 0.3, 0.4};
  EXPECT_THROW(sinkhorn_solve(log_q, r, c3, SinkhornOptions{}), ShapeError);
  SinkhornOptions bad;
  bad.lambda = 0.0;
  EXPECT_THROW(sinkhorn_solve(log_q, r, r, bad), ConfigError);
  Tensor2 nan_q = log_q;
  nan_q(0, 1) = std::nan("");
  EXPECT_THROW(sinkhorn_solve(nan_q, r, r, SinkhornOptions{}), NumericFault);
}

TEST(Sinkhorn, RowPermutationPermutesPlan) {
  RngStream rng(7);
  const Tensor2 log_q = random_log_q(12, 4, rng);
  Tensor2 rev(12, 4);
  for (std::size_t i = 0; i < 12; ++i) {
    for (std::size_t j = 0; j < 4; ++j) rev(i, j) = log_q(11 - i, j);
  }
  const auto a = sinkhorn_plan_uniform(log_q, patient());
  const auto b = sinkhorn_plan_uniform(rev, patient());
  for (std::size_t i = 0; i < 12; ++i) {
    for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(b.plan(i, j), a.plan(11 - i, j), 1e-9);
  }
  EXPECT_NEAR(transport_cost(a.plan, log_q), transport_cost(b.plan, rev), 1e-9);
}

TEST(Hardmax, ArgmaxAndTies) {
  TransportPlan p;
  p.plan = Tensor2::from_rows({{0.1, 0.7, 0.2}, {0.5, 0.5, 0.0}, {0.0, 0.2, 0.8}});
  EXPECT_EQ(hardmax_labels(p), (std::vector<int>{1, 0, 2}));
}

TEST(Hardmax, MatchesLinearProgramAssignmentWhenSeparated) {
  // Rows strongly prefer different columns; the LP puts each row's mass in
  // one column, and so must the rounded entropic plan.
  const Tensor2 log_q = Tensor2::from_rows({{std::log(0.9), std::log(0.1)},
                                            {std::log(0.15), std::log(0.85)},
                                            {std::log(0.6), std::log(0.4)}});
  const std::vector<long> supply{2, 2, 2}, demand{3, 3};
  const auto lp = oracle::min_cost_transport(cost_of(log_q), supply, demand);
  SinkhornOptions o;
  o.lambda = 200.0;
  o.max_sweeps = 100000;
  const auto labels = hardmax_labels(sinkhorn_plan(log_q, fractions(supply), fractions(demand), o));
  for (std::size_t i = 0; i < 3; ++i) {
    const int lp_label = lp.plan[i][1] > lp.plan[i][0] ? 1 : 0;
    EXPECT_EQ(labels[i], lp_label) << "row " << i;
  }
}

TEST(Hardmax, EquipartitionTendency) {
  RngStream rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t m = 2 + rng.below(9);
    const std::size_t n = m * (5 + rng.below(20));
    const auto labels = hardmax_labels(sinkhorn_plan_uniform(random_log_q(n, m, rng), patient()));
    std::vector<std::size_t> occ(m, 0);
    for (int l : labels) ++occ[static_cast<std::size_t>(l)];
    const double target = static_cast<double>(n / m);
    for (std::size_t j = 0; j < m; ++j) {
      EXPECT_LE(std::abs(static_cast<double>(occ[j]) - target), 0.25 * target) << n << "x" << m;
    }
  }
}

TEST(ClusteringLoss, UniformAndPeaked) {
  const std::vector<int> labels{0, 3, 2};
  EXPECT_NEAR(clustering_loss(Tensor2(3, 5, 1.5), labels).loss, std::log(5.0), 1e-12);
  Tensor2 peaked(3, 5, 0.0);
  for (std::size_t i = 0; i < 3; ++i) peaked(i, static_cast<std::size_t>(labels[i])) = 80.0;
  EXPECT_LT(clustering_loss(peaked, labels).loss, 1e-30);
  EXPECT_THROW(clustering_loss(peaked, std::vector<int>{0, 1}), ShapeError);
}

TEST(ClusteringLoss, HeadGradientCheck) {
  const ClusterHead head{6, 4};
  ParameterSet p;
  RngStream rng(9);
  head.init_parameters(p, rng);
  for (double& v : p.value("cluster.b").values()) v = 0.1 * rng.normal();
  Tensor2 emb(5, 6);
  for (std::size_t i = 0; i < emb.size(); ++i) emb[i] = rng.normal();
  p.add("emb", 5, 6).value = emb;
  const std::vector<int> labels{0, 1, 3, 3, 2};
  const LossFunction f = [&](ParameterSet& ps, bool with_grad) {
    const Tensor2 logits = head.logits(ps, ps.value("emb"));
    const LossGrad lg = clustering_loss(logits, labels);
    if (with_grad) {
      Tensor2 dx;
      linear_backward(ps.value("emb"), ps.value("cluster.w"), lg.grad, &dx, ps.grad("cluster.w"),
                      ps.grad("cluster.b"));
      ps.grad("emb") += dx;
    }
    return lg.loss;
  };
  RngStream probe(10);
  EXPECT_LT(grad_check(p, f, 24, probe).max_rel_error, 1e-6);
}

}  // namespace
}  // namespace asgn
