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

#include <filesystem>
#include <string>
#include <vector>

#include "asgn/loop.hpp"

namespace asgn {

// Each CSV starts with a "# schema: <name> v<N>" comment line.
inline constexpr const char* kMetricsSchema = "# schema: asgn-metrics v1";
inline constexpr const char* kCurvesSchema = "# schema: asgn-curves v1";
inline constexpr const char* kSelectionSchema = "# schema: asgn-selection v1";
inline constexpr const char* kAggregateSchema = "# schema: asgn-aggregate v1";
inline constexpr const char* kTimingSchema = "# schema: asgn-timing v1";
inline constexpr const char* kEmbeddingSchema = "# schema: asgn-embeddings v1";

// Shortest text that parses back to the same double.
std::string format_number(double v);

// One row per iteration: counts, per-property validation/test MAE (report
// units), student epochs, selection radii. Wall time goes to timing CSV.
std::string metrics_csv(const MetricHistory& h, const std::vector<std::string>& properties);
// One row per teacher epoch and per student epoch.
std::string curves_csv(const MetricHistory& h);
std::string selection_csv(const std::vector<SelectionLogEntry>& log);
std::string timing_csv(const MetricHistory& h);

struct SeriesPoint {
  double labeled = 0.0;
  double mean = 0.0;
  double spread = 0.0;  // sample standard deviation across seeds (0 for one seed)
  std::size_t seeds = 0;
};

struct Series {
  std::string name;
  std::vector<SeriesPoint> val;
  std::vector<SeriesPoint> test;
};

// Seed aggregate of the first property, row k = iteration k. Runs must agree
// on the labeled count of each iteration they share.
Series aggregate_histories(const std::string& name, const std::vector<MetricHistory>& runs);
std::string aggregate_csv(const Series& s);

// Static label-count vs test MAE chart with one line (and spread band) per series.
std::string label_rate_svg(const std::vector<Series>& series, const std::string& unit);

void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace asgn
