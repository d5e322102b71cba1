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

#include <gtest/gtest.h>

#include <charconv>
#include <cmath>
#include <sstream>

#include "asgn/errors.hpp"
#include "asgn/report.hpp"
#include "helpers.hpp"

namespace asgn {
namespace {

IterationRecord record(std::size_t it, std::size_t labeled, double val, double test) {
  IterationRecord r;
  r.iteration = it;
  r.labeled_count = labeled;
  r.selected = 10;
  r.val_mae = {val};
  r.test_mae = {test};
  r.student_val_curve = {1.0, 0.5};
  r.teacher_curve = {TeacherEpochStats{0.1, 0.2, 0.3, 0.6, 7, true}};
  r.wall_seconds = 1.5;
  return r;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  for (std::string l; std::getline(is, l);) out.push_back(l);
  return out;
}

TEST(FormatNumber, ShortestRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0}) {
    const std::string s = format_number(v);
    double back = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    EXPECT_EQ(back, v) << s;
  }
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(std::nan("")), "nan");
}

TEST(MetricsCsv, SchemaHeaderAndRows) {
  MetricHistory h;
  h.iterations = {record(1, 20, 0.3, 0.31), record(2, 30, 0.2, 0.21)};
  const auto lines = lines_of(metrics_csv(h, {"homo"}));
  ASSERT_EQ(lines.size(), 4u);
  EXPECT_EQ(lines[0], kMetricsSchema);
  EXPECT_EQ(lines[1],
            "iteration,labeled,selected,val_mae_homo,test_mae_homo,student_epochs,student_best_epoch,radius_max,"
            "radius_mean,radius_min");
  EXPECT_EQ(lines[2], "1,20,10,0.3,0.31,0,0,nan,nan,nan");
  EXPECT_EQ(lines_of(timing_csv(h))[2], "1,1.5");
  const auto curves = lines_of(curves_csv(h));
  EXPECT_EQ(curves[0], kCurvesSchema);
  EXPECT_EQ(curves.size(), 2u + 2u * 3u);
  EXPECT_EQ(curves[2], "1,teacher,1,0.1,0.2,0.3,0.6,,7");
}

TEST(MetricsCsv, WallTimeStaysOutOfMetrics) {
  MetricHistory a, b;
  a.iterations = {record(1, 20, 0.3, 0.31)};
  b = a;
  b.iterations[0].wall_seconds = 99.0;
  EXPECT_EQ(metrics_csv(a, {"homo"}), metrics_csv(b, {"homo"}));
  EXPECT_EQ(curves_csv(a), curves_csv(b));
  EXPECT_TRUE(a.same_metrics(b));
  b.iterations[0].val_mae[0] = std::nextafter(0.3, 1.0);
  EXPECT_FALSE(a.same_metrics(b));
}

TEST(Aggregate, MeanAndSampleSpread) {
  MetricHistory a, b, c;
  a.iterations = {record(1, 20, 0.1, 1.0), record(2, 30, 0.4, 2.0)};
  b.iterations = {record(1, 20, 0.2, 2.0), record(2, 30, 0.6, 4.0)};
  c.iterations = {record(1, 20, 0.3, 3.0)};
  const Series s = aggregate_histories("asgn", {a, b, c});
  ASSERT_EQ(s.val.size(), 2u);
  EXPECT_NEAR(s.val[0].mean, 0.2, 1e-15);
  EXPECT_NEAR(s.val[0].spread, 0.1, 1e-15);
  EXPECT_EQ(s.val[0].seeds, 3u);
  EXPECT_NEAR(s.test[1].mean, 3.0, 1e-15);
  EXPECT_NEAR(s.test[1].spread, std::sqrt(2.0), 1e-15);
  EXPECT_EQ(s.val[1].seeds, 2u);
  const auto rows = lines_of(aggregate_csv(s));
  EXPECT_EQ(rows[0], kAggregateSchema);
  EXPECT_EQ(rows.size(), 4u);

  MetricHistory odd;
  odd.iterations = {record(1, 25, 0.1, 0.1)};
  EXPECT_THROW(aggregate_histories("x", {a, odd}), ConfigError);
}

TEST(Plot, SvgHasOneLinePerSeries) {
  MetricHistory a, b;
  a.iterations = {record(1, 20, 0.3, 0.3), record(2, 30, 0.2, 0.2)};
  b.iterations = {record(1, 20, 0.35, 0.4), record(2, 30, 0.3, 0.3)};
  const std::string svg =
      label_rate_svg({aggregate_histories("asgn", {a}), aggregate_histories("supervised-random", {b})}, "eV");
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  EXPECT_NE(svg.find("asgn"), std::string::npos);
  EXPECT_NE(svg.find("supervised-random"), std::string::npos);
  std::size_t polylines = 0;
  for (std::size_t p = svg.find("<polyline"); p != std::string::npos; p = svg.find("<polyline", p + 1)) ++polylines;
  EXPECT_EQ(polylines, 2u);
}

TEST(TextFiles, WriteAndRead) {
  testing::TempDir dir("report");
  write_text_file(dir / "sub/a.txt", "x\ny\n");
  EXPECT_EQ(read_text_file(dir / "sub/a.txt"), "x\ny\n");
  EXPECT_THROW(read_text_file(dir / "missing.txt"), IoError);
}

}  // namespace
}  // namespace asgn
