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

#include "asgn/gradsuite.hpp"

#include <cmath>

#include "asgn/errors.hpp"
#include "asgn/loop.hpp"
#include "asgn/mpgnn.hpp"
#include "asgn/ops.hpp"
#include "asgn/ssl.hpp"

namespace asgn {

MolecularGraph random_molecule(RngStream& rng, std::size_t max_atoms, std::size_t vocab_size, double box,
                               double min_separation) {
  if (max_atoms < 2) throw ConfigError("random_molecule: max_atoms must be >= 2");
  MolecularGraph g;
  const std::size_t n = 2 + rng.below(max_atoms - 1);
  while (g.coordinates.size() < n) {
    const Vec3 p{rng.uniform(0.0, box), rng.uniform(0.0, box), rng.uniform(0.0, box)};
    bool ok = true;
    for (const auto& q : g.coordinates) ok = ok && distance(p, q) >= min_separation;
    if (!ok) continue;
    g.coordinates.push_back(p);
    g.atom_types.push_back(static_cast<int>(rng.below(vocab_size)));
  }
  g.edges = build_edges(g.coordinates);
  g.name = "random";
  return g;
}

namespace {

// Random matrix with entries bounded away from zero, so ReLU kinks stay
// outside the finite-difference stencil.
Tensor2 random_tensor(RngStream& rng, std::size_t r, std::size_t c, double scale = 1.0) {
  Tensor2 t(r, c);
  for (auto& v : t.values()) {
    const double mag = rng.uniform(0.05, 1.0) * scale;
    v = rng.uniform() < 0.5 ? -mag : mag;
  }
  return t;
}

double project(const Tensor2& y, const Tensor2& c) {
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) s += y[i] * c[i];
  return s;
}

// Composed losses contain |z_i - z_j|; a small step keeps its kink outside
// the stencil.
GradSuiteEntry check(const std::string& name, bool composed, double threshold, ParameterSet& params,
                     const LossFunction& loss, std::size_t probes, RngStream& rng) {
  GradSuiteEntry e;
  e.name = name;
  e.composed = composed;
  e.threshold = threshold;
  e.result = grad_check(params, loss, probes, rng, composed ? 1e-5 : 1e-3);
  return e;
}

FilterGrid small_grid() {
  FilterGrid g;
  g.start = 0.5;
  g.stop = 4.5;
  g.step = 0.5;
  g.gamma = 0.5;
  return g;
}

}  // namespace

std::vector<GradSuiteEntry> run_grad_suite(const GradSuiteOptions& opts) {
  const RngStream root(opts.seed);
  std::vector<GradSuiteEntry> out;
  const double tp = opts.primitive_threshold;
  const double tc = opts.composed_threshold;
  const std::size_t probes = opts.probes;

  {
    RngStream rng = root.fork("linear");
    ParameterSet ps;
    ps.add("x", 5, 4).value = random_tensor(rng, 5, 4);
    ps.add("W", 4, 3).value = random_tensor(rng, 4, 3);
    ps.add("b", 1, 3).value = random_tensor(rng, 1, 3);
    const Tensor2 c = random_tensor(rng, 5, 3);
    out.push_back(check("linear", false, tp, ps, [&](ParameterSet& p, bool grad) {
      const Tensor2 y = linear(p.value("x"), p.value("W"), p.value("b"));
      if (grad) {
        Tensor2 dx;
        linear_backward(p.value("x"), p.value("W"), c, &dx, p.grad("W"), p.grad("b"));
        p.grad("x") += dx;
      }
      return project(y, c);
    }, probes, rng));
  }

  for (Activation act : {Activation::ShiftedSoftplus, Activation::Relu}) {
    RngStream rng = root.fork("activation", static_cast<std::uint64_t>(act));
    ParameterSet ps;
    ps.add("x", 6, 5).value = random_tensor(rng, 6, 5, 3.0);
    const Tensor2 c = random_tensor(rng, 6, 5);
    out.push_back(check(std::string("activation.") + std::string(to_string(act)), false, tp, ps,
                        [&](ParameterSet& p, bool grad) {
                          const Tensor2& x = p.value("x");
                          if (grad) p.grad("x") += activate_backward(x, c, act);
                          return project(activate(x, act), c);
                        },
                        probes, rng));
  }

  {
    RngStream rng = root.fork("softmax-ce");
    ParameterSet ps;
    ps.add("logits", 7, 4).value = random_tensor(rng, 7, 4, 2.0);
    std::vector<int> targets(7);
    for (auto& t : targets) t = static_cast<int>(rng.below(4));
    out.push_back(check("softmax_cross_entropy", false, tp, ps, [&](ParameterSet& p, bool grad) {
      LossGrad lg = softmax_cross_entropy(p.value("logits"), targets);
      if (grad) p.grad("logits") += lg.grad;
      return lg.loss;
    }, probes, rng));
  }

  {
    RngStream rng = root.fork("mse");
    ParameterSet ps;
    ps.add("pred", 6, 2).value = random_tensor(rng, 6, 2);
    const Tensor2 target = random_tensor(rng, 6, 2);
    out.push_back(check("mse", false, tp, ps, [&](ParameterSet& p, bool grad) {
      LossGrad lg = mse(p.value("pred"), target);
      if (grad) p.grad("pred") += lg.grad;
      return lg.loss;
    }, probes, rng));
  }

  // Backbone pieces: one interaction layer seen through the node embeddings,
  // then the readouts and the property head seen through the prediction.
  for (Readout readout : {Readout::Mean, Readout::Sum}) {
    RngStream rng = root.fork("backbone", static_cast<std::uint64_t>(readout));
    BackboneConfig cfg;
    cfg.vocab_size = 5;
    cfg.dim = opts.dim;
    cfg.layers = 1;
    cfg.readout = readout;
    cfg.grid = small_grid();
    const Mpgnn net(cfg);
    ParameterSet ps;
    net.init_parameters(ps, rng);
    for (auto& [name, p] : ps.entries()) {
      if (name.ends_with("bias") || name.ends_with(".b1") || name.ends_with(".b2")) p.value = random_tensor(rng, p.value.rows(), p.value.cols(), 0.1);
    }
    const MolecularGraph g = random_molecule(rng, opts.max_atoms, cfg.vocab_size);
    const Tensor2 cn = random_tensor(rng, g.atom_types.size(), cfg.dim);
    const std::string tag = std::string(to_string(readout));
    if (readout == Readout::Mean) {
      out.push_back(check("interaction", false, tp, ps, [&](ParameterSet& p, bool grad) {
        ForwardCache cache;
        net.encode(p, g, cache);
        if (grad) net.backward(p, g, cache, nullptr, nullptr, &cn);
        return project(cache.final_nodes(), cn);
      }, probes, rng));
    }
    const Tensor2 cg = random_tensor(rng, 1, cfg.dim);
    out.push_back(check("readout." + tag, false, tp, ps, [&](ParameterSet& p, bool grad) {
      ForwardCache cache;
      net.encode(p, g, cache);
      if (grad) net.backward(p, g, cache, nullptr, &cg, nullptr);
      return project(cache.graph, cg);
    }, probes, rng));
    const Tensor2 cp = random_tensor(rng, 1, cfg.outputs);
    out.push_back(check("property_head." + tag, false, tp, ps, [&](ParameterSet& p, bool grad) {
      ForwardCache cache;
      net.forward(p, g, cache);
      if (grad) net.backward(p, g, cache, &cp, nullptr, nullptr);
      return project(cache.prediction, cp);
    }, probes, rng));
  }

  {
    RngStream rng = root.fork("cluster-head");
    ClusterHead head{opts.dim, 4};
    ParameterSet ps;
    head.init_parameters(ps, rng);
    ps.add("z", 5, opts.dim).value = random_tensor(rng, 5, opts.dim);
    std::vector<int> labels(5);
    for (auto& l : labels) l = static_cast<int>(rng.below(4));
    out.push_back(check("cluster_head", false, tp, ps, [&](ParameterSet& p, bool grad) {
      LossGrad lg = clustering_loss(head.logits(p, p.value("z")), labels);
      if (grad) {
        Tensor2 dz;
        linear_backward(p.value("z"), p.value("cluster.w"), lg.grad, &dz, p.grad("cluster.w"), p.grad("cluster.b"));
        p.grad("z") += dz;
      }
      return lg.loss;
    }, probes, rng));
  }

  {
    RngStream rng = root.fork("recon-heads");
    ReconHeads heads{opts.dim, 5, 6, Activation::ShiftedSoftplus};
    ParameterSet ps;
    heads.init_parameters(ps, rng);
    const MolecularGraph g = random_molecule(rng, opts.max_atoms, 5);
    // Per column, atoms take distinct levels 0.1 apart so |z_i - z_j| stays
    // differentiable across the stencil.
    Tensor2 z(g.atom_types.size(), opts.dim);
    for (std::size_t c = 0; c < opts.dim; ++c) {
      std::vector<std::size_t> order(z.rows());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      rng.shuffle(std::span<std::size_t>(order));
      for (std::size_t i = 0; i < order.size(); ++i) {
        z(order[i], c) = -0.3 + 0.1 * static_cast<double>(i) + rng.uniform(-0.02, 0.02);
      }
    }
    ps.add("z", z.rows(), opts.dim).value = z;
    DistanceBinning bins{6, 6.0};
    const ReconSample sample = sample_recon(g, 0.9, bins, rng);
    out.push_back(check("recon_heads", false, tp, ps, [&](ParameterSet& p, bool grad) {
      Tensor2 dz(p.value("z").rows(), opts.dim);
      const double l = reconstruction_loss(heads, p, p.value("z"), sample, grad ? &dz : nullptr, grad ? 1.0 : 0.0);
      if (grad) p.grad("z") += dz;
      return l;
    }, probes, rng));
  }

  // Composed teacher objective on a small random batch.
  {
    RngStream rng = root.fork("composed");
    LoopConfig cfg;
    cfg.backbone.vocab_size = 5;
    cfg.backbone.dim = opts.dim;
    cfg.backbone.layers = 2;
    cfg.backbone.outputs = 2;
    cfg.backbone.grid = small_grid();
    cfg.binning = DistanceBinning{6, 6.0};
    cfg.clusters = 4;
    const TeacherModel model = TeacherModel::from_config(cfg);
    ParameterSet ps;
    model.init_parameters(ps, rng);
    std::vector<MolecularGraph> mols;
    std::vector<std::vector<double>> targets;
    TeacherBatch batch;
    for (std::size_t k = 0; k < opts.molecules; ++k) mols.push_back(random_molecule(rng, opts.max_atoms, 5));
    for (std::size_t k = 0; k < opts.molecules; ++k) targets.push_back({rng.normal(), rng.normal()});
    for (std::size_t k = 0; k < opts.molecules; ++k) {
      batch.molecules.push_back(&mols[k]);
      // Leave one molecule unlabeled, as in a batch drawn from the unlabeled pool.
      batch.targets.push_back(k + 1 == opts.molecules && k > 0 ? nullptr : &targets[k]);
      batch.cluster_labels.push_back(static_cast<int>(rng.below(cfg.clusters)));
      batch.samples.push_back(sample_recon(mols[k], 0.5, cfg.binning, rng));
    }
    const struct {
      const char* name;
      LossWeights w;
    } parts[] = {{"loss.property", {1, 0, 0}},
                 {"loss.recon", {0, 1, 0}},
                 {"loss.cluster", {0, 0, 1}},
                 {"loss.total", {1, 1, 1}}};
    for (const auto& part : parts) {
      RngStream probe_rng = rng.fork(part.name);
      ParameterSet copy = ps;
      out.push_back(check(part.name, true, tc, copy, [&](ParameterSet& p, bool grad) {
        return teacher_batch_loss(model, p, batch, part.w, grad).total;
      }, probes, probe_rng));
    }
  }
  return out;
}

}  // namespace asgn
