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

#include "asgn/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "asgn/checkpoint.hpp"
#include "asgn/errors.hpp"
#include "asgn/loop.hpp"
#include "asgn/report.hpp"

#ifndef ASGN_VERSION
#define ASGN_VERSION "unknown"
#endif

namespace asgn {

std::string_view code_version() { return ASGN_VERSION; }

namespace {

std::string hex64(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void check_manifest_fits(const PoolAssignment& pools, std::size_t size, const std::filesystem::path& path) {
  for (const auto* list : {&pools.labeled, &pools.unlabeled, &pools.validation, &pools.test}) {
    for (std::size_t id : *list) {
      if (id >= size) {
        throw ConfigError(path.string() + ": molecule id " + std::to_string(id) + " is outside the dataset of " +
                          std::to_string(size));
      }
    }
  }
}

}  // namespace

PoolAssignment cmd_prepare(const PrepareOptions& opts) {
  if (!std::filesystem::is_directory(opts.data)) throw IoError("dataset directory not found: " + opts.data.string());
  const ChemicalDataset data = ChemicalDataset::load_directory(opts.data, opts.limit);
  const PoolAssignment pools = split_dataset(data.size(), opts.seed, opts.sizes);
  write_manifest(pools, opts.manifest,
                 {"dataset_size " + std::to_string(data.size()), "dataset_hash " + hex64(data.content_hash()),
                  "seed " + std::to_string(opts.seed),
                  "sizes " + std::to_string(opts.sizes.labeled) + " " + std::to_string(opts.sizes.validation) + " " +
                      std::to_string(opts.sizes.test)});
  return pools;
}

RunSummary cmd_run(const RunSpec& spec, const RunOptions& opts) {
  auto log = [&](const std::string& m) {
    if (opts.log) opts.log(m);
  };
  for (const auto& v : spec.strategies) {
    if (!is_known_variant(v)) throw ConfigError("unknown variant '" + v + "'");
  }
  if (spec.seeds.empty()) throw ConfigError("no seeds given");
  for (const auto& v : spec.strategies) apply_variant(spec.loop, v).validate();
  if (!std::filesystem::is_directory(spec.data)) throw IoError("dataset directory not found: " + spec.data.string());

  ChemicalDataset data = ChemicalDataset::load_directory(spec.data, spec.limit);
  PoolAssignment pools;
  if (!spec.manifest.empty()) {
    pools = read_manifest(spec.manifest);
    check_manifest_fits(pools, data.size(), spec.manifest);
  } else {
    pools = split_dataset(data.size(), spec.split_seed, spec.split);
  }
  log("dataset " + spec.data.string() + ": " + std::to_string(data.size()) + " molecules, " +
      std::to_string(pools.labeled.size()) + " labeled / " + std::to_string(pools.validation.size()) +
      " validation / " + std::to_string(pools.test.size()) + " test");

  std::filesystem::create_directories(spec.output);
  RunSummary summary;
  auto record = [&](const std::filesystem::path& rel, const std::string& content) {
    write_text_file(spec.output / rel, content);
    summary.artifacts.push_back(rel);
  };
  record("pools.txt", format_manifest(pools, {"dataset_hash " + hex64(data.content_hash())}));

  std::vector<Series> series;
  std::string unit;
  for (const auto& variant : spec.strategies) {
    const LoopConfig cfg = apply_variant(spec.loop, variant);
    std::vector<MetricHistory> done;
    for (std::uint64_t seed : spec.seeds) {
      const std::filesystem::path rel = std::filesystem::path(variant) / ("seed-" + std::to_string(seed));
      const std::filesystem::path dir = spec.output / rel;
      std::filesystem::create_directories(dir);
      std::filesystem::remove(dir / "FAILED");
      try {
        data.assign_pools(pools);
        AsgnRun run(cfg, data, seed);
        if (unit.empty()) unit = data.schema().report_unit(data.schema().index_of(cfg.properties.front()));
        const auto state_dir = dir / "state";
        if (opts.resume && std::filesystem::exists(state_dir / "state.txt")) {
          run.load_state(state_dir);
          log(variant + " seed " + std::to_string(seed) + ": resumed after iteration " + std::to_string(run.iteration()));
        }
        run.on_log = [&](const std::string& m) { log(variant + " seed " + std::to_string(seed) + ": " + m); };
        run.on_iteration = [&](const IterationRecord& r) {
          std::ostringstream os;
          os << variant << " seed " << seed << ": iteration " << r.iteration << ", " << r.labeled_count
             << " labeled, val MAE " << format_number(r.val_mae.front()) << ", test MAE "
             << format_number(r.test_mae.front()) << " (" << format_number(r.wall_seconds) << " s)";
          log(os.str());
        };
        std::size_t steps = 0;
        while (!run.finished()) {
          if (opts.max_iterations != 0 && steps == opts.max_iterations) break;
          run.step();
          ++steps;
          if (spec.save_state) run.save_state(state_dir);
        }
        if (!run.finished()) {
          ++summary.interrupted;
          log(variant + " seed " + std::to_string(seed) + ": stopped after " + std::to_string(run.iteration()) +
              " iterations (resume to continue)");
          continue;
        }
        record(rel / "metrics.csv", metrics_csv(run.history(), cfg.properties));
        record(rel / "curves.csv", curves_csv(run.history()));
        record(rel / "selection.csv", selection_csv(run.selection_log()));
        record(rel / "timing.txt", timing_csv(run.history()));
        save_checkpoint(to_checkpoint(run.final_model(), cfg.hash()), dir / "model.ckpt");
        summary.artifacts.push_back(rel / "model.ckpt");
        if (spec.save_state) summary.artifacts.push_back(rel / "state" / "state.txt");
        done.push_back(run.history());
        ++summary.completed;
      } catch (const std::exception& e) {
        ++summary.failed;
        write_text_file(dir / "FAILED", std::string(e.what()) + "\n");
        summary.artifacts.push_back(rel / "FAILED");
        log(variant + " seed " + std::to_string(seed) + " FAILED: " + e.what());
      }
    }
    if (!done.empty()) {
      series.push_back(aggregate_histories(variant, done));
      record(std::filesystem::path(variant) / "aggregate.csv", aggregate_csv(series.back()));
    }
  }
  if (!series.empty()) record("label_rate_mae.svg", label_rate_svg(series, unit));

  std::ostringstream man;
  man << "# asgn run manifest v1\n"
      << "code_version " << code_version() << '\n'
      << "dataset " << spec.data.string() << '\n'
      << "dataset_size " << data.size() << '\n'
      << "dataset_hash " << hex64(data.content_hash()) << '\n'
      << "completed " << summary.completed << '\n'
      << "failed " << summary.failed << '\n'
      << "interrupted " << summary.interrupted << '\n'
      << "[spec]\n"
      << format_runspec(spec) << "[artifacts]\n";
  for (const auto& a : summary.artifacts) {
    man << a.generic_string() << ' ' << hex64(fnv1a64(read_text_file(spec.output / a))) << '\n';
  }
  write_text_file(spec.output / "run_manifest.txt", man.str());
  return summary;
}

std::size_t cmd_export_embeddings(const ExportOptions& opts) {
  const ModelBundle model = from_checkpoint(load_checkpoint(opts.checkpoint));
  if (!std::filesystem::is_directory(opts.data)) throw IoError("dataset directory not found: " + opts.data.string());
  ChemicalDataset data = ChemicalDataset::load_directory(opts.data, opts.limit, model.vocabulary);
  if (data.vocabulary().symbols() != model.vocabulary.symbols()) {
    throw ArchitectureError("dataset vocabulary does not match the checkpoint");
  }
  std::vector<std::size_t> ids;
  if (opts.pool == "all") {
    ids.resize(data.size());
    for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = i;
  } else {
    if (opts.manifest.empty()) throw ConfigError("pool '" + opts.pool + "' needs a split manifest");
    const PoolAssignment pools = read_manifest(opts.manifest);
    check_manifest_fits(pools, data.size(), opts.manifest);
    if (opts.pool == "labeled") ids = pools.labeled;
    else if (opts.pool == "unlabeled") ids = pools.unlabeled;
    else if (opts.pool == "validation") ids = pools.validation;
    else if (opts.pool == "test") ids = pools.test;
    else throw ConfigError("unknown pool '" + opts.pool + "'");
  }
  std::sort(ids.begin(), ids.end());
  const Mpgnn net(model.backbone);
  std::ostringstream os;
  os << kEmbeddingSchema << '\n' << "molecule,name";
  for (std::size_t k = 0; k < model.backbone.dim; ++k) os << ",z" << k;
  os << '\n';
  for (std::size_t id : ids) {
    const auto z = net.embed(model.params, data.molecule(id));
    os << id << ',' << data.molecule(id).name;
    for (double v : z) os << ',' << format_number(v);
    os << '\n';
  }
  write_text_file(opts.output, os.str());
  return ids.size();
}

}  // namespace asgn
