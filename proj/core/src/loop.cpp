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

#include "asgn/loop.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <sstream>
#include <unordered_map>

#include "asgn/errors.hpp"

namespace asgn {

std::string_view to_string(Strategy s) { return s == Strategy::KCenter ? "kcenter" : "random"; }

Strategy strategy_from_string(std::string_view s) {
  if (s == "kcenter" || s == "k-center") return Strategy::KCenter;
  if (s == "random") return Strategy::Random;
  throw ConfigError("unknown selection strategy '" + std::string(s) + "' (expected kcenter or random)");
}

void LoopConfig::validate() const {
  backbone.validate();
  if (properties.empty()) throw ConfigError("at least one target property is required");
  if (!(recon_alpha > 0.0 && recon_alpha < 1.0)) throw ConfigError("recon_alpha must be in (0, 1)");
  if (binning.bins < 2 || !(binning.d_max > 0.0)) throw ConfigError("distance binning needs >= 2 bins and d_max > 0");
  if (clusters < 2) throw ConfigError("clusters must be >= 2");
  if (!(sinkhorn.lambda > 0.0) || !(sinkhorn.tolerance > 0.0) || sinkhorn.max_sweeps == 0) {
    throw ConfigError("sinkhorn lambda, tolerance and max_sweeps must be positive");
  }
  if (!(adam.lr > 0.0)) throw ConfigError("learning rate must be positive");
  if (minibatch == 0) throw ConfigError("minibatch must be positive");
  for (double w : {weights.property, weights.recon, weights.cluster}) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ConfigError("loss weights must be finite and non-negative");
  }
  if (student_max_epochs == 0) throw ConfigError("student_max_epochs must be positive");
  if (batch_size == 0) throw ConfigError("batch_size must be positive");
  if (disable_teacher && disable_student) throw ConfigError("teacher and student cannot both be disabled");
}

std::string LoopConfig::canonical() const {
  std::ostringstream os;
  os.precision(17);
  std::string props;
  for (const auto& p : properties) props += (props.empty() ? "" : ",") + p;
  os << "properties = " << props << '\n'
     << "dim = " << backbone.dim << '\n'
     << "layers = " << backbone.layers << '\n'
     << "head_hidden = " << backbone.head_hidden << '\n'
     << "readout = " << to_string(backbone.readout) << '\n'
     << "activation = " << to_string(backbone.activation) << '\n'
     << "grid_start = " << backbone.grid.start << '\n'
     << "grid_stop = " << backbone.grid.stop << '\n'
     << "grid_step = " << backbone.grid.step << '\n'
     << "grid_gamma = " << backbone.grid.gamma << '\n'
     << "recon_alpha = " << recon_alpha << '\n'
     << "recon_bins = " << binning.bins << '\n'
     << "recon_dmax = " << binning.d_max << '\n'
     << "clusters = " << clusters << '\n'
     << "sinkhorn_lambda = " << sinkhorn.lambda << '\n'
     << "sinkhorn_tolerance = " << sinkhorn.tolerance << '\n'
     << "sinkhorn_max_sweeps = " << sinkhorn.max_sweeps << '\n'
     << "lr = " << adam.lr << '\n'
     << "adam_beta1 = " << adam.beta1 << '\n'
     << "adam_beta2 = " << adam.beta2 << '\n'
     << "adam_eps = " << adam.eps << '\n'
     << "minibatch = " << minibatch << '\n'
     << "weight_property = " << weights.property << '\n'
     << "weight_recon = " << weights.recon << '\n'
     << "weight_cluster = " << weights.cluster << '\n'
     << "property_reduction = " << (property_sum ? "sum" : "mean") << '\n'
     << "first_teacher_epochs = " << first_teacher_epochs << '\n'
     << "teacher_epochs = " << teacher_epochs << '\n'
     << "student_patience = " << student_patience << '\n'
     << "student_max_epochs = " << student_max_epochs << '\n'
     << "strategy = " << to_string(strategy) << '\n'
     << "batch_size = " << batch_size << '\n'
     << "budget = " << budget << '\n'
     << "stop_error = " << stop_error << '\n'
     << "disable_teacher = " << disable_teacher << '\n'
     << "disable_student = " << disable_student << '\n'
     << "disable_transfer = " << disable_transfer << '\n';
  return os.str();
}

std::uint64_t LoopConfig::hash() const { return fnv1a64(canonical()); }

TeacherModel TeacherModel::from_config(const LoopConfig& cfg) {
  TeacherModel m{Mpgnn(cfg.backbone), {}, {}, cfg.binning, cfg.recon_alpha};
  m.recon.dim = cfg.backbone.dim;
  m.recon.atom_classes = cfg.backbone.vocab_size;
  m.recon.edge_classes = cfg.binning.bins;
  m.recon.activation = cfg.backbone.activation;
  m.cluster.dim = cfg.backbone.dim;
  m.cluster.clusters = cfg.clusters;
  return m;
}

void TeacherModel::init_parameters(ParameterSet& params, RngStream& rng) const {
  RngStream backbone = rng.fork("backbone");
  RngStream rec = rng.fork("recon");
  RngStream clu = rng.fork("cluster");
  net.init_parameters(params, backbone);
  recon.init_parameters(params, rec);
  cluster.init_parameters(params, clu);
}

LossBreakdown teacher_batch_loss(const TeacherModel& model, ParameterSet& params, const TeacherBatch& batch,
                                 const LossWeights& weights, bool with_grad, bool property_sum) {
  const std::size_t n = batch.molecules.size();
  if (batch.targets.size() != n) throw ShapeError("teacher batch: targets do not match molecules");
  const bool use_recon = weights.recon != 0.0 && !batch.samples.empty();
  const bool use_cluster = weights.cluster != 0.0 && !batch.cluster_labels.empty();
  if (use_recon && batch.samples.size() != n) throw ShapeError("teacher batch: samples do not match molecules");
  if (use_cluster && batch.cluster_labels.size() != n) {
    throw ShapeError("teacher batch: cluster labels do not match molecules");
  }
  LossBreakdown out;
  if (n == 0) return out;

  const std::size_t m = model.net.config().outputs;
  const std::size_t d = model.net.config().dim;
  std::vector<ForwardCache> caches(n);
  std::vector<std::size_t> with_target;
  for (std::size_t b = 0; b < n; ++b) {
    model.net.encode(params, *batch.molecules[b], caches[b]);
    if (batch.targets[b] != nullptr && weights.property != 0.0) {
      if (batch.targets[b]->size() != m) throw ShapeError("teacher batch: label width does not match outputs");
      model.net.head(params, caches[b]);
      with_target.push_back(b);
    }
  }

  std::vector<Tensor2> d_pred(n);
  std::vector<Tensor2> d_graph(n);
  std::vector<Tensor2> d_nodes(n);

  if (!with_target.empty()) {
    const std::size_t np = with_target.size();
    Tensor2 pred(np, m);
    Tensor2 target(np, m);
    for (std::size_t r = 0; r < np; ++r) {
      const std::size_t b = with_target[r];
      std::copy(caches[b].prediction.values().begin(), caches[b].prediction.values().end(), pred.row(r).begin());
      std::copy(batch.targets[b]->begin(), batch.targets[b]->end(), target.row(r).begin());
    }
    LossGrad lg = mse(pred, target);
    const double reduction = property_sum ? static_cast<double>(np) : 1.0;
    out.property = lg.loss * reduction;
    if (with_grad) {
      const double scale = weights.property * reduction;
      for (std::size_t r = 0; r < np; ++r) {
        Tensor2 dp = Tensor2::row_vector(lg.grad.row(r));
        dp *= scale;
        d_pred[with_target[r]] = std::move(dp);
      }
    }
  }

  if (use_recon) {
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t b = 0; b < n; ++b) {
      const Tensor2& nodes = caches[b].final_nodes();
      Tensor2* dn = nullptr;
      if (with_grad) {
        d_nodes[b] = Tensor2(nodes.rows(), d);
        dn = &d_nodes[b];
      }
      out.recon += inv_n * reconstruction_loss(model.recon, params, nodes, batch.samples[b], dn,
                                               with_grad ? weights.recon * inv_n : 0.0);
    }
  }

  if (use_cluster) {
    Tensor2 graphs(n, d);
    for (std::size_t b = 0; b < n; ++b) {
      std::copy(caches[b].graph.values().begin(), caches[b].graph.values().end(), graphs.row(b).begin());
    }
    const Tensor2 logits = model.cluster.logits(params, graphs);
    LossGrad lg = clustering_loss(logits, batch.cluster_labels);
    out.cluster = lg.loss;
    if (with_grad) {
      lg.grad *= weights.cluster;
      Tensor2 dg;
      linear_backward(graphs, params.value("cluster.w"), lg.grad, &dg, params.grad("cluster.w"),
                      params.grad("cluster.b"));
      for (std::size_t b = 0; b < n; ++b) d_graph[b] = Tensor2::row_vector(dg.row(b));
    }
  }

  out.total = weights.property * out.property + weights.recon * out.recon + weights.cluster * out.cluster;
  check_finite(out.total, "teacher loss");

  if (with_grad) {
    for (std::size_t b = 0; b < n; ++b) {
      const Tensor2* dp = d_pred[b].size() ? &d_pred[b] : nullptr;
      const Tensor2* dg = d_graph[b].size() ? &d_graph[b] : nullptr;
      const Tensor2* dn = d_nodes[b].size() ? &d_nodes[b] : nullptr;
      if (dp || dg || dn) model.net.backward(params, *batch.molecules[b], caches[b], dp, dg, dn);
    }
  }
  return out;
}

std::vector<int> compute_self_labels(const TeacherModel& model, const ParameterSet& params,
                                     const ChemicalDataset& data, std::span<const std::size_t> ids,
                                     const SinkhornOptions& opts, std::size_t* sweeps, bool* converged) {
  const std::size_t d = model.net.config().dim;
  Tensor2 graphs(ids.size(), d);
  for (std::size_t r = 0; r < ids.size(); ++r) {
    const auto z = model.net.embed(params, data.molecule(ids[r]));
    std::copy(z.begin(), z.end(), graphs.row(r).begin());
  }
  const Tensor2 log_q = log_softmax(model.cluster.logits(params, graphs));
  const std::vector<double> r(ids.size(), 1.0 / static_cast<double>(ids.size()));
  const std::vector<double> c(log_q.cols(), 1.0 / static_cast<double>(log_q.cols()));
  // A plan that misses the tolerance is still a usable (approximate)
  // assignment; the caller sees the flag.
  const TransportPlan plan = sinkhorn_solve(log_q, r, c, opts);
  if (sweeps) *sweeps = plan.sweeps;
  if (converged) *converged = plan.converged;
  return hardmax_labels(plan);
}

namespace {

std::vector<std::size_t> shuffled(std::span<const std::size_t> ids, const RngStream& rng) {
  std::vector<std::size_t> order(ids.begin(), ids.end());
  std::sort(order.begin(), order.end());
  RngStream r = rng.fork("order");
  r.shuffle(std::span<std::size_t>(order));
  return order;
}

}  // namespace

TeacherEpochStats teacher_epoch(const TeacherModel& model, ParameterSet& params, const ChemicalDataset& data,
                                const TargetTable& targets, std::span<const std::size_t> visible,
                                const LoopConfig& cfg, const RngStream& rng) {
  TeacherEpochStats stats;
  if (visible.empty()) return stats;
  const bool use_cluster = cfg.weights.cluster != 0.0;
  const bool use_recon = cfg.weights.recon != 0.0;

  std::unordered_map<std::size_t, int> label_of;
  if (use_cluster) {
    std::vector<std::size_t> sorted(visible.begin(), visible.end());
    std::sort(sorted.begin(), sorted.end());
    const auto labels =
        compute_self_labels(model, params, data, sorted, cfg.sinkhorn, &stats.sinkhorn_sweeps, &stats.sinkhorn_converged);
    label_of.reserve(sorted.size());
    for (std::size_t i = 0; i < sorted.size(); ++i) label_of.emplace(sorted[i], labels[i]);
  }

  const auto order = shuffled(visible, rng);
  RngStream recon_rng = rng.fork("recon");
  std::size_t batches = 0;
  for (std::size_t start = 0; start < order.size(); start += cfg.minibatch) {
    const std::size_t stop = std::min(order.size(), start + cfg.minibatch);
    TeacherBatch batch;
    for (std::size_t k = start; k < stop; ++k) {
      const std::size_t id = order[k];
      const MolecularGraph& g = data.molecule(id);
      batch.molecules.push_back(&g);
      batch.targets.push_back(id < targets.size() && !targets[id].empty() ? &targets[id] : nullptr);
      if (use_cluster) batch.cluster_labels.push_back(label_of.at(id));
      if (use_recon) batch.samples.push_back(sample_recon(g, model.alpha, model.binning, recon_rng));
    }
    params.zero_grad();
    const LossBreakdown lb = teacher_batch_loss(model, params, batch, cfg.weights, true, cfg.property_sum);
    adam_step(params, cfg.adam);
    stats.property += lb.property;
    stats.recon += lb.recon;
    stats.cluster += lb.cluster;
    stats.total += lb.total;
    ++batches;
  }
  const double inv = 1.0 / static_cast<double>(batches);
  stats.property *= inv;
  stats.recon *= inv;
  stats.cluster *= inv;
  stats.total *= inv;
  return stats;
}

double supervised_epoch(const Mpgnn& net, ParameterSet& params, const ChemicalDataset& data,
                        const TargetTable& targets, std::span<const std::size_t> ids, const LoopConfig& cfg,
                        const RngStream& rng) {
  if (ids.empty()) return 0.0;
  const auto order = shuffled(ids, rng);
  double total = 0.0;
  std::size_t batches = 0;
  for (std::size_t start = 0; start < order.size(); start += cfg.minibatch) {
    const std::size_t stop = std::min(order.size(), start + cfg.minibatch);
    std::vector<const MolecularGraph*> mols;
    std::vector<std::vector<double>> ys;
    for (std::size_t k = start; k < stop; ++k) {
      const std::size_t id = order[k];
      if (id >= targets.size() || targets[id].empty()) {
        throw PoolError("supervised_epoch: molecule " + std::to_string(id) + " has no label");
      }
      mols.push_back(&data.molecule(id));
      ys.push_back(targets[id]);
    }
    const double scale = cfg.property_sum ? static_cast<double>(mols.size()) : 1.0;
    params.zero_grad();
    const double loss = property_loss(net, params, mols, ys, scale) * scale;
    check_finite(loss, "student loss");
    adam_step(params, cfg.adam);
    total += loss;
    ++batches;
  }
  return total / static_cast<double>(batches);
}

ParameterSet transfer_weights(const ParameterSet& teacher, const Mpgnn& student_net) {
  ParameterSet out = teacher.subset([](std::string_view name) { return Mpgnn::owns(name); });
  // Shape check against a freshly initialized student.
  ParameterSet probe;
  RngStream rng(0);
  student_net.init_parameters(probe, rng);
  if (probe.size() != out.size()) throw ArchitectureError("transfer: teacher backbone does not match the student");
  for (const auto& [name, p] : probe.entries()) {
    if (!out.contains(name) || !p.value.same_shape(out.value(name))) {
      throw ArchitectureError("transfer: parameter '" + name + "' has no counterpart of the same shape");
    }
  }
  return out;
}

double validation_score(const Mpgnn& net, const ParameterSet& params, const ChemicalDataset& data,
                        std::span<const std::size_t> ids, std::span<const std::size_t> selection,
                        const NormStats& norm) {
  const auto mae = evaluate_mae(net, params, data, ids, selection, norm);
  double s = 0.0;
  for (std::size_t k = 0; k < mae.size(); ++k) {
    s += mae[k] / (norm.stddev[k] * data.schema().report_scale(selection[k]));
  }
  return s / static_cast<double>(mae.size());
}

StudentResult finetune_student(const Mpgnn& net, ParameterSet init, const ChemicalDataset& data,
                               const TargetTable& targets, std::span<const std::size_t> selection,
                               const NormStats& norm, const LoopConfig& cfg, const RngStream& rng) {
  const auto& labeled = data.pool(Pool::Labeled);
  const auto& val = data.pool(Pool::Validation);
  StudentResult res;
  ParameterSet params = std::move(init);
  params.reset_optimizer();
  res.best_score = validation_score(net, params, data, val, selection, norm);
  res.val_curve.push_back(res.best_score);
  res.best = params;
  std::size_t stale = 0;
  for (std::size_t epoch = 1; epoch <= cfg.student_max_epochs; ++epoch) {
    supervised_epoch(net, params, data, targets, labeled, cfg, rng.fork("epoch", epoch));
    const double score = validation_score(net, params, data, val, selection, norm);
    res.val_curve.push_back(score);
    res.epochs = epoch;
    if (score < res.best_score) {
      res.best_score = score;
      res.best_epoch = epoch;
      res.best = params;
      stale = 0;
    } else {
      ++stale;
    }
    if (stale >= cfg.student_patience) break;
  }
  res.best.zero_grad();
  return res;
}

PseudoLabelTable assign_pseudo_labels(const Mpgnn& student_net, const ParameterSet& student,
                                      const ChemicalDataset& data) {
  PseudoLabelTable t;
  t.student_version = student.hash();
  for (std::size_t id : data.pool(Pool::Unlabeled)) t.labels.emplace(id, student_net.predict(student, data.molecule(id)));
  return t;
}

namespace {

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof(double)) == 0; }

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!same_bits(a[i], b[i])) return false;
  }
  return true;
}

}  // namespace

bool MetricHistory::same_metrics(const MetricHistory& other) const {
  if (iterations.size() != other.iterations.size()) return false;
  for (std::size_t i = 0; i < iterations.size(); ++i) {
    const auto& a = iterations[i];
    const auto& b = other.iterations[i];
    if (a.iteration != b.iteration || a.labeled_count != b.labeled_count || a.selected != b.selected ||
        a.student_best_epoch != b.student_best_epoch || a.student_epochs != b.student_epochs) {
      return false;
    }
    if (!same_bits(a.val_mae, b.val_mae) || !same_bits(a.test_mae, b.test_mae) ||
        !same_bits(a.student_val_curve, b.student_val_curve)) {
      return false;
    }
    if (!same_bits(a.radius_max, b.radius_max) || !same_bits(a.radius_mean, b.radius_mean) ||
        !same_bits(a.radius_min, b.radius_min)) {
      return false;
    }
    if (a.teacher_curve.size() != b.teacher_curve.size()) return false;
    for (std::size_t e = 0; e < a.teacher_curve.size(); ++e) {
      const auto& x = a.teacher_curve[e];
      const auto& y = b.teacher_curve[e];
      if (!same_bits(x.property, y.property) || !same_bits(x.recon, y.recon) || !same_bits(x.cluster, y.cluster) ||
          !same_bits(x.total, y.total) || x.sinkhorn_sweeps != y.sinkhorn_sweeps ||
          x.sinkhorn_converged != y.sinkhorn_converged) {
        return false;
      }
    }
  }
  return true;
}

AsgnRun::AsgnRun(LoopConfig cfg, ChemicalDataset& data, std::uint64_t seed)
    : cfg_(std::move(cfg)), data_(data), seed_(seed), root_(seed), model_{Mpgnn(BackboneConfig{}), {}, {}, {}, 0.5} {
  cfg_.backbone.vocab_size = data_.vocabulary().size();
  cfg_.backbone.outputs = cfg_.properties.size();
  cfg_.validate();
  for (const auto& p : cfg_.properties) selection_.push_back(data_.schema().index_of(p));
  model_ = TeacherModel::from_config(cfg_);

  const auto& labeled = data_.pool(Pool::Labeled);
  if (data_.pool(Pool::Validation).empty()) throw ConfigError("validation pool is empty");
  if (data_.pool(Pool::Test).empty()) throw ConfigError("test pool is empty");
  if (labeled.size() > cfg_.budget) {
    throw ConfigError("budget " + std::to_string(cfg_.budget) + " is below the initial labeled pool size " +
                      std::to_string(labeled.size()));
  }
  initial_labeled_ = labeled.size();
  std::vector<std::vector<double>> rows;
  rows.reserve(labeled.size());
  for (std::size_t id : labeled) rows.push_back(select_properties(data_.label(id), selection_));
  norm_ = NormStats::fit(rows, cfg_.properties);

  RngStream init = root_.fork("teacher-init");
  model_.init_parameters(teacher_, init);
}

TargetTable AsgnRun::build_targets(bool include_pseudo) const {
  TargetTable t(data_.size());
  for (std::size_t id : data_.pool(Pool::Labeled)) t[id] = norm_.apply(select_properties(data_.label(id), selection_));
  if (include_pseudo) {
    for (const auto& [id, y] : pseudo_.labels) {
      if (data_.pool_of(id) == Pool::Unlabeled) t[id] = y;
    }
  }
  return t;
}

EmbeddingMatrix AsgnRun::embeddings_for_selection() const {
  const ParameterSet& params = (cfg_.disable_teacher && student_) ? *student_ : teacher_;
  std::vector<std::size_t> ids = data_.pool(Pool::Labeled);
  const auto& unl = data_.pool(Pool::Unlabeled);
  ids.insert(ids.end(), unl.begin(), unl.end());
  std::sort(ids.begin(), ids.end());
  Tensor2 rows(ids.size(), cfg_.backbone.dim);
  for (std::size_t r = 0; r < ids.size(); ++r) {
    const auto z = model_.net.embed(params, data_.molecule(ids[r]));
    std::copy(z.begin(), z.end(), rows.row(r).begin());
  }
  return EmbeddingMatrix(std::move(ids), std::move(rows));
}

void AsgnRun::log(const std::string& msg) const {
  if (on_log) on_log(msg);
}

void AsgnRun::step() {
  if (finished_) return;
  const auto t0 = std::chrono::steady_clock::now();
  ++iteration_;
  const std::size_t t = iteration_;
  const RngStream rng = root_.fork("iteration", t);
  IterationRecord rec;
  rec.iteration = t;

  if (!cfg_.disable_teacher) {
    const TargetTable targets = build_targets(!cfg_.disable_student);
    std::vector<std::size_t> visible = data_.pool(Pool::Labeled);
    const auto& unl = data_.pool(Pool::Unlabeled);
    visible.insert(visible.end(), unl.begin(), unl.end());
    std::sort(visible.begin(), visible.end());
    const std::size_t epochs = t == 1 ? cfg_.first_teacher_epochs : cfg_.teacher_epochs;
    for (std::size_t e = 0; e < epochs; ++e) {
      rec.teacher_curve.push_back(
          teacher_epoch(model_, teacher_, data_, targets, visible, cfg_, rng.fork("teacher-epoch", e)));
      if (!rec.teacher_curve.back().sinkhorn_converged) {
        log("iteration " + std::to_string(t) + " epoch " + std::to_string(e) +
            ": sinkhorn stopped at the sweep cap before reaching tolerance");
      }
    }
  }

  const std::size_t have = data_.pool(Pool::Labeled).size();
  const std::size_t avail = data_.pool(Pool::Unlabeled).size();
  if (have + cfg_.batch_size <= cfg_.budget && cfg_.batch_size <= avail) {
    SelectionBatch sel;
    if (cfg_.strategy == Strategy::KCenter) {
      sel = k_center_select(embeddings_for_selection(), data_.pool(Pool::Labeled), data_.pool(Pool::Unlabeled),
                            cfg_.batch_size);
    } else {
      RngStream pick = rng.fork("select");
      sel = random_select(data_.pool(Pool::Unlabeled), cfg_.batch_size, pick);
    }
    data_.oracle_label(sel.ids);
    oracle_queries_ += sel.ids.size();
    rec.selected = sel.ids.size();
    for (std::size_t k = 0; k < sel.ids.size(); ++k) {
      selection_log_.push_back({t, k, sel.ids[k], sel.radii.empty() ? std::numeric_limits<double>::quiet_NaN()
                                                                    : sel.radii[k]});
    }
    if (!sel.radii.empty()) {
      rec.radius_max = *std::max_element(sel.radii.begin(), sel.radii.end());
      rec.radius_min = *std::min_element(sel.radii.begin(), sel.radii.end());
      double s = 0.0;
      for (double r : sel.radii) s += r;
      rec.radius_mean = s / static_cast<double>(sel.radii.size());
    }
  } else {
    log("iteration " + std::to_string(t) + ": no selection (" + std::to_string(have) + " labeled, batch " +
        std::to_string(cfg_.batch_size) + ", budget " + std::to_string(cfg_.budget) + ", " + std::to_string(avail) +
        " unlabeled)");
  }
  rec.labeled_count = data_.pool(Pool::Labeled).size();

  const auto& val = data_.pool(Pool::Validation);
  const auto& test = data_.pool(Pool::Test);
  if (!cfg_.disable_student) {
    ParameterSet init;
    if (cfg_.disable_transfer) {
      RngStream r = root_.fork("student-init").fork("backbone");
      model_.net.init_parameters(init, r);
    } else {
      init = transfer_weights(teacher_, model_.net);
    }
    const TargetTable targets = build_targets(false);
    StudentResult res =
        finetune_student(model_.net, std::move(init), data_, targets, selection_, norm_, cfg_, rng.fork("student"));
    rec.student_val_curve = res.val_curve;
    rec.student_best_epoch = res.best_epoch;
    rec.student_epochs = res.epochs;
    student_ = std::move(res.best);
    rec.val_mae = evaluate_mae(model_.net, *student_, data_, val, selection_, norm_);
    rec.test_mae = evaluate_mae(model_.net, *student_, data_, test, selection_, norm_);
    if (!cfg_.disable_teacher) pseudo_ = assign_pseudo_labels(model_.net, *student_, data_);
  } else {
    rec.val_mae = evaluate_mae(model_.net, teacher_, data_, val, selection_, norm_);
    rec.test_mae = evaluate_mae(model_.net, teacher_, data_, test, selection_, norm_);
  }

  rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  finished_ = rec.selected == 0 || rec.val_mae.front() <= cfg_.stop_error;
  history_.iterations.push_back(rec);
  if (on_iteration) on_iteration(history_.iterations.back());
}

const MetricHistory& AsgnRun::run() {
  while (!finished_) step();
  return history_;
}

ModelBundle AsgnRun::final_model() const {
  ModelBundle b;
  b.backbone = cfg_.backbone;
  b.vocabulary = data_.vocabulary();
  b.norm = norm_;
  b.properties = cfg_.properties;
  const ParameterSet& src = (!cfg_.disable_student && student_) ? *student_ : teacher_;
  b.params = src.subset([](std::string_view name) { return Mpgnn::owns(name); });
  return b;
}

MetricHistory run_asgn(const LoopConfig& cfg, ChemicalDataset& data, std::uint64_t seed) {
  AsgnRun run(cfg, data, seed);
  return run.run();
}

}  // namespace asgn
