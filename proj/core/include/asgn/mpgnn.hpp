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
#include <string>
#include <vector>

#include "asgn/dataset.hpp"
#include "asgn/molgraph.hpp"
#include "asgn/ops.hpp"
#include "asgn/params.hpp"

namespace asgn {

// Gaussian filter centers start, start+step, ..., up to stop (Angstrom).
struct FilterGrid {
  double start = 0.0;
  double stop = 30.0;
  double step = 0.1;
  double gamma = 50.0;  // 1 / (2 step^2)

  std::size_t count() const;
  double center(std::size_t k) const { return start + step * static_cast<double>(k); }
  void validate() const;

  friend bool operator==(const FilterGrid&, const FilterGrid&) = default;
};

// Component k = exp(-gamma (d - d_k)^2). Throws GeometryError for d <= 0.
std::vector<double> rbf_expand(double distance, const FilterGrid& grid);

// Components with gamma (d - d_k)^2 above this (value < 1e-30) are dropped
// from the per-edge filter product.
inline constexpr double kRbfNegligibleExponent = 69.07755278982137;

// Non-negligible RBF window of every edge of a graph, flattened.
struct EdgeBasis {
  std::vector<std::uint32_t> first;
  std::vector<std::uint32_t> count;
  std::vector<std::size_t> offset;
  std::vector<double> values;
};
EdgeBasis make_edge_basis(std::span<const Edge> edges, const FilterGrid& grid);

enum class Readout { Mean, Sum };
std::string_view to_string(Readout r);
Readout readout_from_string(std::string_view s);

struct BackboneConfig {
  std::size_t vocab_size = 5;
  std::size_t dim = 96;
  std::size_t layers = 4;
  std::size_t outputs = 1;
  std::size_t head_hidden = 0;  // 0: same as dim
  Readout readout = Readout::Mean;
  Activation activation = Activation::ShiftedSoftplus;
  FilterGrid grid;

  std::size_t hidden() const { return head_hidden == 0 ? dim : head_hidden; }
  void validate() const;
};

// Intermediate values of one molecule's forward pass, kept for backward.
struct ForwardCache {
  EdgeBasis basis;
  std::vector<Tensor2> node;       // layers + 1 entries, atoms x dim
  std::vector<Tensor2> filter;     // per layer, edges x dim
  std::vector<Tensor2> aggregate;  // per layer, z_i + sum_j z_j * F_ij
  std::vector<Tensor2> preact;     // per layer, aggregate W + b
  Tensor2 graph;                   // 1 x dim
  Tensor2 head_preact;
  Tensor2 head_hidden;
  Tensor2 prediction;  // 1 x outputs

  const Tensor2& final_nodes() const { return node.back(); }
};

// Message-passing backbone with property head.
//
// Layer update (sum aggregation with a self term):
//   F_ij   = rbf(d_ij) . filter_l                      (N_f -> dim)
//   a_i    = z_i + sum_{j != i} z_j * F_ij              (elementwise *)
//   z'_i   = act(a_i W_l + b_l)
// Readout is a mean or sum over atoms; the head is dim -> hidden -> outputs.
class Mpgnn {
 public:
  explicit Mpgnn(BackboneConfig cfg);

  const BackboneConfig& config() const noexcept { return cfg_; }

  // Adds embedding, message layers and head with Glorot weights and zero biases.
  void init_parameters(ParameterSet& params, RngStream& rng) const;

  // Node embeddings and graph embedding.
  void encode(const ParameterSet& params, const MolecularGraph& g, ForwardCache& cache) const;
  // Property head on cache.graph.
  void head(const ParameterSet& params, ForwardCache& cache) const;
  void forward(const ParameterSet& params, const MolecularGraph& g, ForwardCache& cache) const {
    encode(params, g, cache);
    head(params, cache);
  }

  std::vector<double> predict(const ParameterSet& params, const MolecularGraph& g) const;
  std::vector<double> embed(const ParameterSet& params, const MolecularGraph& g) const;

  // Accumulates parameter gradients. Any upstream term may be null:
  // d_prediction (1 x outputs), d_graph (1 x dim), d_nodes (atoms x dim, final layer).
  void backward(ParameterSet& params, const MolecularGraph& g, const ForwardCache& cache,
                const Tensor2* d_prediction, const Tensor2* d_graph, const Tensor2* d_nodes) const;

  // Names of the parameters this class owns (backbone + head).
  static bool owns(std::string_view name);

 private:
  void check_types(const MolecularGraph& g) const;

  BackboneConfig cfg_;
};

// Mean-squared property loss over a batch in normalized target space; with
// grad_scale != 0 accumulates grad_scale * dL/dtheta.
double property_loss(const Mpgnn& net, ParameterSet& params, std::span<const MolecularGraph* const> batch,
                     std::span<const std::vector<double>> targets, double grad_scale = 0.0);

// Per-property MAE over `ids`, predictions denormalized and reported in
// physical units (Hartree quantities in eV). Throws PoolError for an empty
// pool or hidden labels.
std::vector<double> evaluate_mae(const Mpgnn& net, const ParameterSet& params, const ChemicalDataset& data,
                                 std::span<const std::size_t> ids, std::span<const std::size_t> selection,
                                 const NormStats& norm);

}  // namespace asgn
