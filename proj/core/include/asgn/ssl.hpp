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
#include <span>
#include <utility>
#include <vector>

#include "asgn/molgraph.hpp"
#include "asgn/ops.hpp"
#include "asgn/params.hpp"
#include "asgn/rng.hpp"

namespace asgn {

// ---------------------------------------------------------------------------
// Node/edge reconstruction

// Uniform bins over [0, d_max]; bin m has center (m + 0.5) d_max / bins.
struct DistanceBinning {
  std::size_t bins = 30;
  double d_max = 30.0;

  double width() const { return d_max / static_cast<double>(bins); }
  double center(std::size_t m) const { return (static_cast<double>(m) + 0.5) * width(); }
  // Index of the nearest center; distances past d_max land in the last bin.
  int bin_of(double d) const;
};

struct ReconSample {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  std::vector<std::uint32_t> nodes;  // sorted endpoints of the sampled edges
  std::vector<int> node_classes;
  std::vector<int> edge_bins;
};

// ceil(alpha |G|) distinct edges (at least one, at most all) drawn uniformly
// without replacement, plus their endpoint atoms.
ReconSample sample_recon(const MolecularGraph& g, double alpha, const DistanceBinning& bins, RngStream& rng);

struct ReconHeads {
  std::size_t dim = 96;
  std::size_t atom_classes = 5;
  std::size_t edge_classes = 30;
  Activation activation = Activation::ShiftedSoftplus;

  // recon.node.* : dim -> dim -> atom_classes
  // recon.edge.* : 2 dim -> dim -> edge_classes, input [z_i + z_j, |z_i - z_j|]
  void init_parameters(ParameterSet& params, RngStream& rng) const;
};

// Mean node-type cross-entropy plus mean edge-bin cross-entropy for one
// molecule. With grad_scale != 0, accumulates grad_scale * dL into the head
// parameters and into *d_nodes (atoms x dim).
double reconstruction_loss(const ReconHeads& heads, ParameterSet& params, const Tensor2& nodes,
                           const ReconSample& sample, Tensor2* d_nodes = nullptr, double grad_scale = 0.0);

// ---------------------------------------------------------------------------
// Equipartition clustering

struct SinkhornOptions {
  double lambda = 25.0;
  double tolerance = 1e-6;
  std::size_t max_sweeps = 1000;
};

struct TransportPlan {
  Tensor2 plan;  // N x M
  std::vector<double> row_marginal;
  std::vector<double> col_marginal;
  std::size_t sweeps = 0;
  double row_residual = 0.0;
  double col_residual = 0.0;
  bool converged = false;
};

// Entropic transport with cost -log Q: plan = diag(u) Q^lambda diag(v),
// scalings found by alternating row/column updates in log space. Stops once
// both marginal residuals (max abs) fall below tolerance. Never throws on
// non-convergence; check `converged`.
TransportPlan sinkhorn_solve(const Tensor2& log_q, std::span<const double> row_marginal,
                             std::span<const double> col_marginal, const SinkhornOptions& opts);

// As sinkhorn_solve, but throws ConvergenceError with the residual when the
// sweep budget runs out.
TransportPlan sinkhorn_plan(const Tensor2& log_q, std::span<const double> row_marginal,
                            std::span<const double> col_marginal, const SinkhornOptions& opts);

// Uniform marginals 1/N and 1/M.
TransportPlan sinkhorn_plan_uniform(const Tensor2& log_q, const SinkhornOptions& opts);

// Row-wise argmax; ties go to the lowest cluster index.
std::vector<int> hardmax_labels(const TransportPlan& plan);

// <plan, -log Q>
double transport_cost(const Tensor2& plan, const Tensor2& log_q);

// Cluster head: one linear layer dim -> clusters ("cluster.w", "cluster.b").
struct ClusterHead {
  std::size_t dim = 96;
  std::size_t clusters = 100;

  void init_parameters(ParameterSet& params, RngStream& rng) const;
  Tensor2 logits(const ParameterSet& params, const Tensor2& graph_embeddings) const;
};

// Softmax cross-entropy of the logits against fixed hard labels, mean over
// rows. Returns loss and d loss / d logits.
LossGrad clustering_loss(const Tensor2& logits, std::span<const int> labels);

}  // namespace asgn
