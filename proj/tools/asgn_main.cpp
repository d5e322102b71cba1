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

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "asgn/commands.hpp"
#include "asgn/errors.hpp"
#include "asgn/gradsuite.hpp"
#include "asgn/runspec.hpp"
#include "asgn/synth.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

// --data beats ASGN_DATA_ROOT, which beats the value from the spec file.
std::filesystem::path resolve_data(const std::string& flag, const std::filesystem::path& fallback) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("ASGN_DATA_ROOT"); env != nullptr && *env != '\0') return env;
  return fallback;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Active semi-supervised molecular property prediction"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(asgn::code_version()));
  spdlog::set_pattern("[%H:%M:%S] %v");

  // prepare
  asgn::PrepareOptions prep;
  std::string prep_data;
  auto* prepare = app.add_subcommand("prepare", "Split a dataset into pools and write the manifest");
  prepare->add_option("--data", prep_data, "Dataset directory (default: $ASGN_DATA_ROOT)");
  prepare->add_option("--out", prep.manifest, "Manifest file to write")->required();
  prepare->add_option("--labeled", prep.sizes.labeled, "Initial labeled pool size")->capture_default_str();
  prepare->add_option("--validation", prep.sizes.validation, "Validation pool size")->capture_default_str();
  prepare->add_option("--test", prep.sizes.test, "Test pool size")->capture_default_str();
  prepare->add_option("--seed", prep.seed, "Split seed")->capture_default_str();
  prepare->add_option("--limit", prep.limit, "Read at most this many files (0: all)")->capture_default_str();

  // run
  std::string spec_path, run_data, run_output;
  std::vector<std::string> overrides;
  asgn::RunOptions run_opts;
  auto* run = app.add_subcommand("run", "Run the active-learning loop for every variant and seed of a run spec");
  run->add_option("spec", spec_path, "Run spec file (key = value lines)")->required();
  run->add_option("--data", run_data, "Override the dataset directory");
  run->add_option("--output", run_output, "Override the output directory");
  run->add_option("--set", overrides, "Extra key=value assignments applied after the file");
  run->add_flag("--resume", run_opts.resume, "Continue runs from their saved state");
  run->add_option("--max-iterations", run_opts.max_iterations,
                  "Stop each run after this many iterations in this invocation (0: no limit)");
  run->footer(asgn::runspec_reference());

  // export-embeddings
  asgn::ExportOptions exp;
  std::string exp_data;
  auto* export_cmd = app.add_subcommand("export-embeddings", "Write graph embeddings of a pool as CSV");
  export_cmd->add_option("--checkpoint", exp.checkpoint, "Model checkpoint")->required();
  export_cmd->add_option("--data", exp_data, "Dataset directory (default: $ASGN_DATA_ROOT)");
  export_cmd->add_option("--manifest", exp.manifest, "Split manifest (needed for a named pool)");
  export_cmd->add_option("--pool", exp.pool, "all, labeled, unlabeled, validation or test")->capture_default_str();
  export_cmd->add_option("--limit", exp.limit, "Read at most this many files (0: all)");
  export_cmd->add_option("--out", exp.output, "Output CSV")->required();

  // grad-check
  asgn::GradSuiteOptions grad;
  auto* gradcheck = app.add_subcommand("grad-check", "Finite-difference check of every gradient");
  gradcheck->add_option("--seed", grad.seed, "Seed")->capture_default_str();
  gradcheck->add_option("--probes", grad.probes, "Probed entries per parameter tensor")->capture_default_str();
  gradcheck->add_option("--dim", grad.dim, "Embedding width of the network checks")->capture_default_str();

  // synthesize
  asgn::SynthOptions syn;
  std::filesystem::path syn_out;
  auto* synth = app.add_subcommand("synthesize", "Write a synthetic QM9-format dataset");
  synth->add_option("--out", syn_out, "Directory to write")->required();
  synth->add_option("--count", syn.count, "Number of molecules")->capture_default_str();
  synth->add_option("--seed", syn.seed, "Seed")->capture_default_str();
  synth->add_option("--min-heavy", syn.min_heavy, "Minimum heavy atoms")->capture_default_str();
  synth->add_option("--max-heavy", syn.max_heavy, "Maximum heavy atoms")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (prepare->parsed()) {
      prep.data = resolve_data(prep_data, {});
      if (prep.data.empty()) throw asgn::ConfigError("no dataset directory (use --data or ASGN_DATA_ROOT)");
      const auto pools = asgn::cmd_prepare(prep);
      spdlog::info("wrote {}: {} labeled, {} unlabeled, {} validation, {} test", prep.manifest.string(),
                   pools.labeled.size(), pools.unlabeled.size(), pools.validation.size(), pools.test.size());
    } else if (run->parsed()) {
      asgn::RunSpec spec = asgn::load_runspec(spec_path);
      for (const auto& kv : overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw asgn::ConfigError("--set expects key=value, got '" + kv + "'");
        asgn::set_runspec_key(spec, kv.substr(0, eq), kv.substr(eq + 1));
      }
      spec.data = resolve_data(run_data, spec.data);
      if (!run_output.empty()) spec.output = run_output;
      if (spec.data.empty()) throw asgn::ConfigError("no dataset directory (set data, --data or ASGN_DATA_ROOT)");
      run_opts.log = [](const std::string& m) { spdlog::info("{}", m); };
      const auto summary = asgn::cmd_run(spec, run_opts);
      spdlog::info("{} runs completed, {} failed, {} interrupted; outputs in {}", summary.completed, summary.failed,
                   summary.interrupted, spec.output.string());
      if (!summary.ok()) return kExitRuntime;
    } else if (export_cmd->parsed()) {
      exp.data = resolve_data(exp_data, {});
      if (exp.data.empty()) throw asgn::ConfigError("no dataset directory (use --data or ASGN_DATA_ROOT)");
      const std::size_t rows = asgn::cmd_export_embeddings(exp);
      spdlog::info("wrote {} rows to {}", rows, exp.output.string());
    } else if (gradcheck->parsed()) {
      bool ok = true;
      std::printf("%-28s %-9s %12s %10s  %s\n", "check", "kind", "max_rel_err", "threshold", "worst");
      for (const auto& e : asgn::run_grad_suite(grad)) {
        ok = ok && e.passed();
        std::printf("%-28s %-9s %12.3e %10.0e  %s[%zu] (%.3e vs %.3e) %s\n", e.name.c_str(), e.composed ? "composed" : "primitive",
                    e.result.max_rel_error, e.threshold, e.result.worst_parameter.c_str(), e.result.worst_index, e.result.analytic, e.result.numeric,
                    e.passed() ? "ok" : "FAIL");
      }
      if (!ok) return kExitRuntime;
    } else if (synth->parsed()) {
      const std::size_t n = asgn::write_synthetic_dataset(syn, syn_out);
      spdlog::info("wrote {} molecules to {}", n, syn_out.string());
    }
  } catch (const asgn::ConfigError& e) {
    spdlog::error("configuration error: {}", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitRuntime;
  }
  return kExitOk;
}
