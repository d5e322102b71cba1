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
#include <string>
#include <vector>

#include "asgn/dataset.hpp"
#include "asgn/runspec.hpp"

namespace asgn {

using LogSink = std::function<void(const std::string&)>;

struct PrepareOptions {
  std::filesystem::path data;
  std::filesystem::path manifest;
  SplitSizes sizes;
  std::uint64_t seed = 0;
  std::size_t limit = 0;
};

// Loads the dataset, splits it and writes the manifest. Identical inputs
// give a byte-identical file; oversized splits fail before anything is written.
PoolAssignment cmd_prepare(const PrepareOptions& opts);

struct RunOptions {
  bool resume = false;
  // Stop every run after this many iterations in this invocation, leaving
  // its resume state behind (0: run to completion).
  std::size_t max_iterations = 0;
  LogSink log;
};

struct RunSummary {
  std::size_t completed = 0;
  std::size_t failed = 0;
  std::size_t interrupted = 0;
  std::vector<std::filesystem::path> artifacts;  // relative to spec.output

  bool ok() const { return failed == 0 && interrupted == 0; }
};

// Output layout under spec.output:
//   run_manifest.txt, pools.txt, label_rate_mae.svg
//   <variant>/aggregate.csv
//   <variant>/seed-<s>/{metrics,curves,selection}.csv, timing.txt, model.ckpt,
//   state/ (resume data), FAILED (only after an error)
RunSummary cmd_run(const RunSpec& spec, const RunOptions& opts = {});

struct ExportOptions {
  std::filesystem::path checkpoint;
  std::filesystem::path data;
  std::filesystem::path manifest;  // required unless pool == "all"
  std::string pool = "all";        // all, labeled, unlabeled, validation, test
  std::filesystem::path output;
  std::size_t limit = 0;
};

// CSV of molecule id and graph embedding, one row per pool member in id
// order. Returns the row count.
std::size_t cmd_export_embeddings(const ExportOptions& opts);

std::string_view code_version();

}  // namespace asgn
