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

#include <algorithm>
#include <cmath>

#include "asgn/errors.hpp"
#include "asgn/ssl.hpp"

namespace asgn {

int DistanceBinning::bin_of(double d) const {
  if (d <= 0.0) return 0;
  const auto m = static_cast<std::size_t>(std::floor(d / width()));
  return static_cast<int>(std::min(m, bins - 1));
}

ReconSample sample_recon(const MolecularGraph& g, double alpha, const DistanceBinning& bins, RngStream& rng) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("reconstruction alpha must lie in (0, 1)");
  ReconSample s;
  const std::size_t ne = g.edges.size();
  if (ne == 0) return s;
  auto want = static_cast<std::size_t>(std::ceil(alpha * static_cast<double>(g.atom_count())));
  want = std::clamp<std::size_t>(want, 1, ne);
  for (std::size_t e : rng.sample_without_replacement(ne, want)) {
    const Edge& edge = g.edges[e];
    s.edges.emplace_back(edge.i, edge.j);
    s.edge_bins.push_back(bins.bin_of(edge.distance));
    s.nodes.push_back(edge.i);
    s.nodes.push_back(edge.j);
  }
  std::sort(s.nodes.begin(), s.nodes.end());
  s.nodes.erase(std::unique(s.nodes.begin(), s.nodes.end()), s.nodes.end());
  for (std::uint32_t v : s.nodes) s.node_classes.push_back(g.atom_types[v]);
  return s;
}

void ReconHeads::init_parameters(ParameterSet& params, RngStream& rng) const {
  glorot_uniform(params.add("recon.node.w1", dim, dim).value, rng);
  params.add("recon.node.b1", 1, dim);
  glorot_uniform(params.add("recon.node.w2", dim, atom_classes).value, rng);
  params.add("recon.node.b2", 1, atom_classes);
  glorot_uniform(params.add("recon.edge.w1", 2 * dim, dim).value, rng);
  params.add("recon.edge.b1", 1, dim);
  glorot_uniform(params.add("recon.edge.w2", dim, edge_classes).value, rng);
  params.add("recon.edge.b2", 1, edge_classes);
}

namespace {

// Two-layer MLP classifier; returns CE loss and writes d input if requested.
double mlp_cross_entropy(ParameterSet& params, const std::string& prefix, Activation act, const Tensor2& x,
                         std::span<const int> targets, Tensor2* dx, double grad_scale) {
  const Tensor2& w1 = params.value(prefix + ".w1");
  const Tensor2& w2 = params.value(prefix + ".w2");
  const Tensor2 pre = linear(x, w1, params.value(prefix + ".b1"));
  const Tensor2 hid = activate(pre, act);
  const Tensor2 logits = linear(hid, w2, params.value(prefix + ".b2"));
  LossGrad lg = softmax_cross_entropy(logits, targets);
  if (grad_scale != 0.0) {
    lg.grad *= grad_scale;
    Tensor2 dhid;
    linear_backward(hid, w2, lg.grad, &dhid, params.grad(prefix + ".w2"), params.grad(prefix + ".b2"));
    const Tensor2 dpre = activate_backward(pre, dhid, act);
    linear_backward(x, w1, dpre, dx, params.grad(prefix + ".w1"), params.grad(prefix + ".b1"));
  }
  return lg.loss;
}

}  // namespace

double reconstruction_loss(const ReconHeads& heads, ParameterSet& params, const Tensor2& nodes,
                           const ReconSample& sample, Tensor2* d_nodes, double grad_scale) {
  const std::size_t d = heads.dim;
  if (nodes.cols() != d) throw ShapeError("reconstruction_loss: node embedding width mismatch");
  if (sample.edges.empty()) return 0.0;
  for (int b : sample.edge_bins) {
    if (b < 0 || static_cast<std::size_t>(b) >= heads.edge_classes) {
      throw ShapeError("reconstruction_loss: distance bin " + std::to_string(b) + " outside [0, " +
                       std::to_string(heads.edge_classes) + ")");
    }
  }
  const bool want_grad = grad_scale != 0.0;
  if (want_grad && d_nodes == nullptr) throw ShapeError("reconstruction_loss: gradient requested without d_nodes");

  Tensor2 xn(sample.nodes.size(), d);
  for (std::size_t r = 0; r < sample.nodes.size(); ++r) {
    const auto src = nodes.row(sample.nodes[r]);
    std::copy(src.begin(), src.end(), xn.row(r).begin());
  }
  Tensor2 dxn;
  const double node_loss = mlp_cross_entropy(params, "recon.node", heads.activation, xn, sample.node_classes,
                                             want_grad ? &dxn : nullptr, grad_scale);

  Tensor2 xe(sample.edges.size(), 2 * d);
  for (std::size_t r = 0; r < sample.edges.size(); ++r) {
    const auto zi = nodes.row(sample.edges[r].first);
    const auto zj = nodes.row(sample.edges[r].second);
    auto out = xe.row(r);
    for (std::size_t c = 0; c < d; ++c) {
      out[c] = zi[c] + zj[c];
      out[d + c] = std::abs(zi[c] - zj[c]);
    }
  }
  Tensor2 dxe;
  const double edge_loss = mlp_cross_entropy(params, "recon.edge", heads.activation, xe, sample.edge_bins,
                                             want_grad ? &dxe : nullptr, grad_scale);

  if (want_grad) {
    require_shape(*d_nodes, nodes.rows(), d, "reconstruction node gradient");
    for (std::size_t r = 0; r < sample.nodes.size(); ++r) {
      auto dst = d_nodes->row(sample.nodes[r]);
      const auto src = dxn.row(r);
      for (std::size_t c = 0; c < d; ++c) dst[c] += src[c];
    }
    for (std::size_t r = 0; r < sample.edges.size(); ++r) {
      const std::size_t i = sample.edges[r].first;
      const std::size_t j = sample.edges[r].second;
      const auto zi = nodes.row(i);
      const auto zj = nodes.row(j);
      const auto g = dxe.row(r);
      auto di = d_nodes->row(i);
      auto dj = d_nodes->row(j);
      for (std::size_t c = 0; c < d; ++c) {
        const double diff = zi[c] - zj[c];
        const double sgn = diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0);
        di[c] += g[c] + g[d + c] * sgn;
        dj[c] += g[c] - g[d + c] * sgn;
      }
    }
  }
  return node_loss + edge_loss;
}

}  // namespace asgn
