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

#include "asgn/mpgnn.hpp"

#include <algorithm>
#include <cmath>

#include "asgn/errors.hpp"

namespace asgn {

namespace {

std::string layer_name(std::size_t l, const char* what) { return "mp" + std::to_string(l) + "." + what; }

// dst[0..n) += s * src[0..n)
inline void axpy(double* dst, const double* src, double s, std::size_t n) {
  for (std::size_t c = 0; c < n; ++c) dst[c] += s * src[c];
}

// dst += a * b (elementwise)
inline void fma_rows(double* dst, const double* a, const double* b, std::size_t n) {
  for (std::size_t c = 0; c < n; ++c) dst[c] += a[c] * b[c];
}

}  // namespace

std::size_t FilterGrid::count() const {
  return static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
}

void FilterGrid::validate() const {
  if (!(step > 0.0)) throw ConfigError("filter grid step must be positive");
  if (!(stop >= start)) throw ConfigError("filter grid stop must not precede start");
  if (!(gamma > 0.0)) throw ConfigError("filter width gamma must be positive");
}

std::vector<double> rbf_expand(double distance, const FilterGrid& grid) {
  if (!(distance > 0.0)) throw GeometryError("rbf_expand: distance must be positive");
  std::vector<double> out(grid.count());
  for (std::size_t k = 0; k < out.size(); ++k) {
    const double t = distance - grid.center(k);
    out[k] = std::exp(-grid.gamma * t * t);
  }
  return out;
}

EdgeBasis make_edge_basis(std::span<const Edge> edges, const FilterGrid& grid) {
  EdgeBasis b;
  b.first.reserve(edges.size());
  b.count.reserve(edges.size());
  b.offset.reserve(edges.size());
  const double half_width = std::sqrt(kRbfNegligibleExponent / grid.gamma);
  const long last = static_cast<long>(grid.count()) - 1;
  for (const Edge& e : edges) {
    const long lo = std::max(0L, static_cast<long>(std::ceil((e.distance - half_width - grid.start) / grid.step)));
    const long hi = std::min(last, static_cast<long>(std::floor((e.distance + half_width - grid.start) / grid.step)));
    b.offset.push_back(b.values.size());
    if (hi < lo) {
      b.first.push_back(0);
      b.count.push_back(0);
      continue;
    }
    b.first.push_back(static_cast<std::uint32_t>(lo));
    b.count.push_back(static_cast<std::uint32_t>(hi - lo + 1));
    for (long k = lo; k <= hi; ++k) {
      const double t = e.distance - grid.center(static_cast<std::size_t>(k));
      b.values.push_back(std::exp(-grid.gamma * t * t));
    }
  }
  return b;
}

std::string_view to_string(Readout r) { return r == Readout::Mean ? "mean" : "sum"; }

Readout readout_from_string(std::string_view s) {
  if (s == "mean") return Readout::Mean;
  if (s == "sum") return Readout::Sum;
  throw ConfigError("unknown readout '" + std::string(s) + "' (expected mean or sum)");
}

void BackboneConfig::validate() const {
  if (layers < 1) throw ConfigError("backbone needs at least one message-passing layer");
  if (dim < 1) throw ConfigError("embedding dimension must be at least 1");
  if (outputs < 1) throw ConfigError("backbone needs at least one output");
  if (vocab_size < 1) throw ConfigError("atom vocabulary is empty");
  grid.validate();
}

Mpgnn::Mpgnn(BackboneConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

bool Mpgnn::owns(std::string_view name) {
  return name == "embedding" || name.starts_with("mp") || name.starts_with("head.");
}

void Mpgnn::init_parameters(ParameterSet& params, RngStream& rng) const {
  const std::size_t d = cfg_.dim;
  const std::size_t nf = cfg_.grid.count();
  glorot_uniform(params.add("embedding", cfg_.vocab_size, d).value, rng);
  for (std::size_t l = 0; l < cfg_.layers; ++l) {
    glorot_uniform(params.add(layer_name(l, "filter"), nf, d).value, rng);
    glorot_uniform(params.add(layer_name(l, "weight"), d, d).value, rng);
    params.add(layer_name(l, "bias"), 1, d);
  }
  glorot_uniform(params.add("head.w1", d, cfg_.hidden()).value, rng);
  params.add("head.b1", 1, cfg_.hidden());
  glorot_uniform(params.add("head.w2", cfg_.hidden(), cfg_.outputs).value, rng);
  params.add("head.b2", 1, cfg_.outputs);
}

void Mpgnn::check_types(const MolecularGraph& g) const {
  for (int t : g.atom_types) {
    if (t < 0 || static_cast<std::size_t>(t) >= cfg_.vocab_size) {
      throw ConfigError("molecule " + std::to_string(g.id) + ": atom type " + std::to_string(t) +
                        " outside the model vocabulary of " + std::to_string(cfg_.vocab_size));
    }
  }
  if (g.atom_types.empty()) throw GeometryError("molecule " + std::to_string(g.id) + " has no atoms");
}

void Mpgnn::encode(const ParameterSet& params, const MolecularGraph& g, ForwardCache& cache) const {
  check_types(g);
  const std::size_t n = g.atom_count();
  const std::size_t d = cfg_.dim;
  const std::size_t ne = g.edges.size();

  cache.basis = make_edge_basis(g.edges, cfg_.grid);
  cache.node.assign(cfg_.layers + 1, Tensor2());
  cache.filter.assign(cfg_.layers, Tensor2());
  cache.aggregate.assign(cfg_.layers, Tensor2());
  cache.preact.assign(cfg_.layers, Tensor2());

  const Tensor2& emb = params.value("embedding");
  require_shape(emb, cfg_.vocab_size, d, "embedding");
  Tensor2 z(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    const auto src = emb.row(static_cast<std::size_t>(g.atom_types[i]));
    std::copy(src.begin(), src.end(), z.row(i).begin());
  }
  cache.node[0] = std::move(z);

  for (std::size_t l = 0; l < cfg_.layers; ++l) {
    const Tensor2& wf = params.value(layer_name(l, "filter"));
    require_shape(wf, cfg_.grid.count(), d, "filter weights");
    const Tensor2& zin = cache.node[l];

    Tensor2 filt(ne, d);
    for (std::size_t e = 0; e < ne; ++e) {
      double* out = filt.data() + e * d;
      const double* vals = cache.basis.values.data() + cache.basis.offset[e];
      const std::size_t k0 = cache.basis.first[e];
      for (std::size_t k = 0; k < cache.basis.count[e]; ++k) axpy(out, wf.data() + (k0 + k) * d, vals[k], d);
    }

    Tensor2 agg = zin;
    for (std::size_t e = 0; e < ne; ++e) {
      const std::size_t i = g.edges[e].i;
      const std::size_t j = g.edges[e].j;
      const double* f = filt.data() + e * d;
      fma_rows(agg.data() + i * d, zin.data() + j * d, f, d);
      fma_rows(agg.data() + j * d, zin.data() + i * d, f, d);
    }

    Tensor2 pre = linear(agg, params.value(layer_name(l, "weight")), params.value(layer_name(l, "bias")));
    cache.node[l + 1] = activate(pre, cfg_.activation);
    cache.filter[l] = std::move(filt);
    cache.aggregate[l] = std::move(agg);
    cache.preact[l] = std::move(pre);
  }

  const Tensor2& zl = cache.node.back();
  cache.graph = Tensor2(1, d);
  for (std::size_t i = 0; i < n; ++i) axpy(cache.graph.data(), zl.data() + i * d, 1.0, d);
  if (cfg_.readout == Readout::Mean) cache.graph *= 1.0 / static_cast<double>(n);
  check_finite(cache.graph, "graph readout");
}

void Mpgnn::head(const ParameterSet& params, ForwardCache& cache) const {
  cache.head_preact = linear(cache.graph, params.value("head.w1"), params.value("head.b1"));
  cache.head_hidden = activate(cache.head_preact, cfg_.activation);
  cache.prediction = linear(cache.head_hidden, params.value("head.w2"), params.value("head.b2"));
}

std::vector<double> Mpgnn::predict(const ParameterSet& params, const MolecularGraph& g) const {
  ForwardCache cache;
  forward(params, g, cache);
  return {cache.prediction.values().begin(), cache.prediction.values().end()};
}

std::vector<double> Mpgnn::embed(const ParameterSet& params, const MolecularGraph& g) const {
  ForwardCache cache;
  encode(params, g, cache);
  return {cache.graph.values().begin(), cache.graph.values().end()};
}

void Mpgnn::backward(ParameterSet& params, const MolecularGraph& g, const ForwardCache& cache,
                     const Tensor2* d_prediction, const Tensor2* d_graph, const Tensor2* d_nodes) const {
  const std::size_t n = g.atom_count();
  const std::size_t d = cfg_.dim;
  const std::size_t ne = g.edges.size();

  Tensor2 dgraph(1, d);
  if (d_graph != nullptr) {
    require_shape(*d_graph, 1, d, "graph embedding gradient");
    dgraph += *d_graph;
  }
  if (d_prediction != nullptr) {
    require_shape(*d_prediction, 1, cfg_.outputs, "prediction gradient");
    Tensor2 dhidden;
    linear_backward(cache.head_hidden, params.value("head.w2"), *d_prediction, &dhidden, params.grad("head.w2"),
                    params.grad("head.b2"));
    Tensor2 dpre = activate_backward(cache.head_preact, dhidden, cfg_.activation);
    Tensor2 dg;
    linear_backward(cache.graph, params.value("head.w1"), dpre, &dg, params.grad("head.w1"), params.grad("head.b1"));
    dgraph += dg;
  }

  Tensor2 dz(n, d);
  if (d_nodes != nullptr) {
    require_shape(*d_nodes, n, d, "node embedding gradient");
    dz += *d_nodes;
  }
  const double pool_scale = cfg_.readout == Readout::Mean ? 1.0 / static_cast<double>(n) : 1.0;
  for (std::size_t i = 0; i < n; ++i) axpy(dz.data() + i * d, dgraph.data(), pool_scale, d);

  for (std::size_t l = cfg_.layers; l-- > 0;) {
    const Tensor2 dpre = activate_backward(cache.preact[l], dz, cfg_.activation);
    Tensor2 dagg;
    linear_backward(cache.aggregate[l], params.value(layer_name(l, "weight")), dpre, &dagg,
                    params.grad(layer_name(l, "weight")), params.grad(layer_name(l, "bias")));

    const Tensor2& zin = cache.node[l];
    const Tensor2& filt = cache.filter[l];
    Tensor2 dzin = dagg;  // self term
    Tensor2& dwf = params.grad(layer_name(l, "filter"));
    std::vector<double> dfilt(d);
    for (std::size_t e = 0; e < ne; ++e) {
      const std::size_t i = g.edges[e].i;
      const std::size_t j = g.edges[e].j;
      const double* f = filt.data() + e * d;
      const double* dai = dagg.data() + i * d;
      const double* daj = dagg.data() + j * d;
      const double* zi = zin.data() + i * d;
      const double* zj = zin.data() + j * d;
      for (std::size_t c = 0; c < d; ++c) dfilt[c] = dai[c] * zj[c] + daj[c] * zi[c];
      fma_rows(dzin.data() + j * d, dai, f, d);
      fma_rows(dzin.data() + i * d, daj, f, d);
      const double* vals = cache.basis.values.data() + cache.basis.offset[e];
      const std::size_t k0 = cache.basis.first[e];
      for (std::size_t k = 0; k < cache.basis.count[e]; ++k) axpy(dwf.data() + (k0 + k) * d, dfilt.data(), vals[k], d);
    }
    dz = std::move(dzin);
  }

  Tensor2& demb = params.grad("embedding");
  for (std::size_t i = 0; i < n; ++i) {
    axpy(demb.data() + static_cast<std::size_t>(g.atom_types[i]) * d, dz.data() + i * d, 1.0, d);
  }
}

double property_loss(const Mpgnn& net, ParameterSet& params, std::span<const MolecularGraph* const> batch,
                     std::span<const std::vector<double>> targets, double grad_scale) {
  if (targets.size() != batch.size()) {
    throw PoolError("property_loss: " + std::to_string(batch.size()) + " molecules but " +
                    std::to_string(targets.size()) + " labels");
  }
  const std::size_t m = net.config().outputs;
  std::vector<ForwardCache> caches(batch.size());
  Tensor2 pred(batch.size(), m);
  Tensor2 target(batch.size(), m);
  for (std::size_t b = 0; b < batch.size(); ++b) {
    if (targets[b].size() != m) throw PoolError("property_loss: label width does not match model outputs");
    net.forward(params, *batch[b], caches[b]);
    std::copy(caches[b].prediction.values().begin(), caches[b].prediction.values().end(), pred.row(b).begin());
    std::copy(targets[b].begin(), targets[b].end(), target.row(b).begin());
  }
  LossGrad lg = mse(pred, target);
  if (grad_scale != 0.0) {
    for (std::size_t b = 0; b < batch.size(); ++b) {
      Tensor2 dp = Tensor2::row_vector(lg.grad.row(b));
      dp *= grad_scale;
      net.backward(params, *batch[b], caches[b], &dp, nullptr, nullptr);
    }
  }
  return lg.loss;
}

std::vector<double> evaluate_mae(const Mpgnn& net, const ParameterSet& params, const ChemicalDataset& data,
                                 std::span<const std::size_t> ids, std::span<const std::size_t> selection,
                                 const NormStats& norm) {
  if (ids.empty()) throw PoolError("evaluate_mae: empty pool");
  std::vector<double> total(selection.size(), 0.0);
  for (std::size_t id : ids) {
    const auto truth = select_properties(data.label(id), selection);
    const auto pred = norm.invert(net.predict(params, data.molecule(id)));
    for (std::size_t k = 0; k < selection.size(); ++k) {
      total[k] += std::abs(pred[k] - truth[k]) * data.schema().report_scale(selection[k]);
    }
  }
  for (double& v : total) v /= static_cast<double>(ids.size());
  return total;
}

}  // namespace asgn
