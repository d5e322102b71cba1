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
#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "asgn/active.hpp"
#include "asgn/checkpoint.hpp"
#include "asgn/dataset.hpp"
#include "asgn/mpgnn.hpp"
#include "asgn/params.hpp"
#include "asgn/ssl.hpp"

namespace asgn {

enum class Strategy { KCenter, Random };
std::string_view to_string(Strategy s);
Strategy strategy_from_string(std::string_view s);

struct LossWeights {
  double property = 1.0;
  double recon = 1.0;
  double cluster = 1.0;
};

struct LoopConfig {
  // Model. backbone.vocab_size and backbone.outputs are filled in from the
  // dataset and the property selection when a run starts.
  BackboneConfig backbone;
  std::vector<std::string> properties{"homo"};
  double recon_alpha = 0.5;
  DistanceBinning binning;
  std::size_t clusters = 100;
  SinkhornOptions sinkhorn;

  // Optimization.
  AdamConfig adam;
  std::size_t minibatch = 32;
  LossWeights weights;
  bool property_sum = false;  // sum instead of mean over molecules in L_p
  std::size_t first_teacher_epochs = 20;
  std::size_t teacher_epochs = 20;
  std::size_t student_patience = 20;
  std::size_t student_max_epochs = 300;

  // Active learning.
  Strategy strategy = Strategy::KCenter;
  std::size_t batch_size = 1000;
  std::size_t budget = 5000;
  double stop_error = 0.0;  // validation MAE of the first property, report units

  // Ablations.
  bool disable_teacher = false;   // ASGN-S
  bool disable_student = false;   // ASGN-T
  bool disable_transfer = false;  // student re-initialized every iteration

  // Throws ConfigError.
  void validate() const;
  // Stable "key = value" rendering of every field; hash() is FNV-1a of it.
  std::string canonical() const;
  std::uint64_t hash() const;
};

// Teacher network: shared backbone + property head, reconstruction heads and
// cluster head.
struct TeacherModel {
  Mpgnn net;
  ReconHeads recon;
  ClusterHead cluster;
  DistanceBinning binning;
  double alpha = 0.5;

  static TeacherModel from_config(const LoopConfig& cfg);
  void init_parameters(ParameterSet& params, RngStream& rng) const;
};

// Per-molecule inputs of one teacher minibatch. A null target means the
// molecule carries no (pseudo) label; empty cluster_labels / samples switch
// that loss off.
struct TeacherBatch {
  std::vector<const MolecularGraph*> molecules;
  std::vector<const std::vector<double>*> targets;
  std::vector<int> cluster_labels;
  std::vector<ReconSample> samples;
};

struct LossBreakdown {
  double property = 0.0;
  double recon = 0.0;
  double cluster = 0.0;
  double total = 0.0;
};

// w_p L_p + w_r L_r + w_c L_c for one minibatch. L_p averages over molecules
// with targets (or sums, with property_sum), L_r and L_c average over the
// batch. Accumulates gradients when with_grad is set.
LossBreakdown teacher_batch_loss(const TeacherModel& model, ParameterSet& params, const TeacherBatch& batch,
                                 const LossWeights& weights, bool with_grad, bool property_sum = false);

// Normalized targets by molecule id; an empty vector means no target.
using TargetTable = std::vector<std::vector<double>>;

struct TeacherEpochStats {
  double property = 0.0;
  double recon = 0.0;
  double cluster = 0.0;
  double total = 0.0;
  std::size_t sinkhorn_sweeps = 0;
  bool sinkhorn_converged = true;
};

// Hard self-labels for `ids` from the current cluster head (Sinkhorn with
// uniform marginals, then hardmax).
std::vector<int> compute_self_labels(const TeacherModel& model, const ParameterSet& params,
                                     const ChemicalDataset& data, std::span<const std::size_t> ids,
                                     const SinkhornOptions& opts, std::size_t* sweeps = nullptr,
                                     bool* converged = nullptr);

// One pass of minibatch Adam over `visible`. Self-labels are recomputed at
// the start of the epoch when the cluster weight is non-zero. The minibatch
// order comes from rng.fork("order"), reconstruction samples from
// rng.fork("recon").
TeacherEpochStats teacher_epoch(const TeacherModel& model, ParameterSet& params, const ChemicalDataset& data,
                                const TargetTable& targets, std::span<const std::size_t> visible,
                                const LoopConfig& cfg, const RngStream& rng);

// Plain supervised MSE epoch over `ids` with the same minibatch order rule.
// Returns the mean batch loss.
double supervised_epoch(const Mpgnn& net, ParameterSet& params, const ChemicalDataset& data,
                        const TargetTable& targets, std::span<const std::size_t> ids, const LoopConfig& cfg,
                        const RngStream& rng);

// Copies backbone and property head; teacher-only heads stay behind and the
// optimizer state starts fresh.
ParameterSet transfer_weights(const ParameterSet& teacher, const Mpgnn& student_net);

// Early-stopping criterion: mean over properties of validation MAE divided by
// the property's standard deviation (normalized units).
double validation_score(const Mpgnn& net, const ParameterSet& params, const ChemicalDataset& data,
                        std::span<const std::size_t> ids, std::span<const std::size_t> selection,
                        const NormStats& norm);

struct StudentResult {
  ParameterSet best;
  double best_score = std::numeric_limits<double>::infinity();
  std::size_t best_epoch = 0;  // 0: the initialization itself
  std::size_t epochs = 0;
  std::vector<double> val_curve;  // index 0 = before training
};

// Adam on the labeled-pool MSE; stops after `patience` consecutive epochs
// without a validation improvement (patience 0: exactly one epoch) or at
// student_max_epochs. Returns the best-validation parameters.
StudentResult finetune_student(const Mpgnn& net, ParameterSet init, const ChemicalDataset& data,
                               const TargetTable& targets, std::span<const std::size_t> selection,
                               const NormStats& norm, const LoopConfig& cfg, const RngStream& rng);

struct PseudoLabelTable {
  std::map<std::size_t, std::vector<double>> labels;  // normalized space
  std::uint64_t student_version = 0;                  // hash of the producing parameters
};

PseudoLabelTable assign_pseudo_labels(const Mpgnn& student_net, const ParameterSet& student,
                                      const ChemicalDataset& data);

struct IterationRecord {
  std::size_t iteration = 0;
  std::size_t labeled_count = 0;
  std::size_t selected = 0;
  std::vector<double> val_mae;   // per property, report units
  std::vector<double> test_mae;  // per property, report units
  std::vector<TeacherEpochStats> teacher_curve;
  std::vector<double> student_val_curve;
  std::size_t student_best_epoch = 0;
  std::size_t student_epochs = 0;
  double radius_max = std::numeric_limits<double>::quiet_NaN();
  double radius_mean = std::numeric_limits<double>::quiet_NaN();
  double radius_min = std::numeric_limits<double>::quiet_NaN();
  double wall_seconds = 0.0;  // not part of equality
};

struct MetricHistory {
  std::vector<IterationRecord> iterations;

  // Bitwise equality of everything except wall time.
  bool same_metrics(const MetricHistory& other) const;
};

struct SelectionLogEntry {
  std::size_t iteration = 0;
  std::size_t order = 0;
  std::size_t molecule = 0;
  double radius = std::numeric_limits<double>::quiet_NaN();
};

// Algorithm driver. Each iteration: train/finetune the teacher, select a
// batch and query the oracle (while the budget allows), transfer weights,
// finetune the student, evaluate, refresh pseudo labels. Stops after the
// first iteration that cannot select (budget reached) or once validation
// MAE <= stop_error.
class AsgnRun {
 public:
  // `data` must already carry its pool assignment.
  AsgnRun(LoopConfig cfg, ChemicalDataset& data, std::uint64_t seed);

  bool finished() const noexcept { return finished_; }
  void step();
  const MetricHistory& run();

  const LoopConfig& config() const noexcept { return cfg_; }
  const MetricHistory& history() const noexcept { return history_; }
  const std::vector<SelectionLogEntry>& selection_log() const noexcept { return selection_log_; }
  const ParameterSet& teacher() const noexcept { return teacher_; }
  const std::optional<ParameterSet>& student() const noexcept { return student_; }
  const PseudoLabelTable& pseudo_labels() const noexcept { return pseudo_; }
  const NormStats& norm() const noexcept { return norm_; }
  const TeacherModel& teacher_model() const noexcept { return model_; }
  std::span<const std::size_t> selection() const noexcept { return selection_; }
  std::size_t oracle_queries() const noexcept { return oracle_queries_; }
  std::size_t iteration() const noexcept { return iteration_; }

  // The model whose metrics are reported: the student, or the teacher in
  // the no-student ablation.
  ModelBundle final_model() const;

  // Iteration-boundary state (parameters with optimizer moments, pools,
  // pseudo labels, history) written into `dir`.
  void save_state(const std::filesystem::path& dir) const;
  // Restores a saved state; config and seed must match the saved ones.
  void load_state(const std::filesystem::path& dir);

  std::function<void(const IterationRecord&)> on_iteration;
  std::function<void(const std::string&)> on_log;

 private:
  TargetTable build_targets(bool include_pseudo) const;
  EmbeddingMatrix embeddings_for_selection() const;
  void log(const std::string& msg) const;

  LoopConfig cfg_;
  ChemicalDataset& data_;
  std::uint64_t seed_;
  RngStream root_;
  TeacherModel model_;
  std::vector<std::size_t> selection_;
  NormStats norm_;
  ParameterSet teacher_;
  std::optional<ParameterSet> student_;
  PseudoLabelTable pseudo_;
  MetricHistory history_;
  std::vector<SelectionLogEntry> selection_log_;
  std::size_t iteration_ = 0;
  std::size_t oracle_queries_ = 0;
  std::size_t initial_labeled_ = 0;
  bool finished_ = false;
};

MetricHistory run_asgn(const LoopConfig& cfg, ChemicalDataset& data, std::uint64_t seed);

}  // namespace asgn
