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

#include "asgn/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "asgn/errors.hpp"

namespace asgn {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string metrics_csv(const MetricHistory& h, const std::vector<std::string>& properties) {
  std::ostringstream os;
  os << kMetricsSchema << '\n' << "iteration,labeled,selected";
  for (const auto& p : properties) os << ",val_mae_" << p;
  for (const auto& p : properties) os << ",test_mae_" << p;
  os << ",student_epochs,student_best_epoch,radius_max,radius_mean,radius_min\n";
  for (const auto& r : h.iterations) {
    os << r.iteration << ',' << r.labeled_count << ',' << r.selected;
    for (double v : r.val_mae) os << ',' << format_number(v);
    for (double v : r.test_mae) os << ',' << format_number(v);
    os << ',' << r.student_epochs << ',' << r.student_best_epoch << ',' << format_number(r.radius_max) << ','
       << format_number(r.radius_mean) << ',' << format_number(r.radius_min) << '\n';
  }
  return os.str();
}

std::string curves_csv(const MetricHistory& h) {
  std::ostringstream os;
  os << kCurvesSchema << '\n' << "iteration,phase,epoch,property,recon,cluster,total,val_score,sinkhorn_sweeps\n";
  for (const auto& r : h.iterations) {
    for (std::size_t e = 0; e < r.teacher_curve.size(); ++e) {
      const auto& t = r.teacher_curve[e];
      os << r.iteration << ",teacher," << e + 1 << ',' << format_number(t.property) << ',' << format_number(t.recon)
         << ',' << format_number(t.cluster) << ',' << format_number(t.total) << ",," << t.sinkhorn_sweeps << '\n';
    }
    for (std::size_t e = 0; e < r.student_val_curve.size(); ++e) {
      os << r.iteration << ",student," << e << ",,,,," << format_number(r.student_val_curve[e]) << ",\n";
    }
  }
  return os.str();
}

std::string selection_csv(const std::vector<SelectionLogEntry>& log) {
  std::ostringstream os;
  os << kSelectionSchema << '\n' << "iteration,order,molecule,radius\n";
  for (const auto& s : log) {
    os << s.iteration << ',' << s.order << ',' << s.molecule << ',' << format_number(s.radius) << '\n';
  }
  return os.str();
}

std::string timing_csv(const MetricHistory& h) {
  std::ostringstream os;
  os << kTimingSchema << '\n' << "iteration,wall_seconds\n";
  for (const auto& r : h.iterations) os << r.iteration << ',' << format_number(r.wall_seconds) << '\n';
  return os.str();
}

namespace {

SeriesPoint summarize(double labeled, const std::vector<double>& xs) {
  SeriesPoint p;
  p.labeled = labeled;
  p.seeds = xs.size();
  double s = 0.0;
  for (double x : xs) s += x;
  p.mean = s / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double q = 0.0;
    for (double x : xs) q += (x - p.mean) * (x - p.mean);
    p.spread = std::sqrt(q / static_cast<double>(xs.size() - 1));
  }
  return p;
}

}  // namespace

Series aggregate_histories(const std::string& name, const std::vector<MetricHistory>& runs) {
  Series s;
  s.name = name;
  std::size_t depth = 0;
  for (const auto& r : runs) depth = std::max(depth, r.iterations.size());
  for (std::size_t k = 0; k < depth; ++k) {
    std::vector<double> val, test;
    std::size_t labeled = 0;
    bool first = true;
    for (const auto& r : runs) {
      if (k >= r.iterations.size()) continue;
      const auto& rec = r.iterations[k];
      if (first) {
        labeled = rec.labeled_count;
        first = false;
      } else if (rec.labeled_count != labeled) {
        throw ConfigError("aggregate '" + name + "': runs disagree on the labeled count of iteration " +
                          std::to_string(k + 1));
      }
      val.push_back(rec.val_mae.front());
      test.push_back(rec.test_mae.front());
    }
    s.val.push_back(summarize(static_cast<double>(labeled), val));
    s.test.push_back(summarize(static_cast<double>(labeled), test));
  }
  return s;
}

std::string aggregate_csv(const Series& s) {
  std::ostringstream os;
  os << kAggregateSchema << '\n' << "iteration,labeled,seeds,val_mean,val_std,test_mean,test_std\n";
  for (std::size_t k = 0; k < s.val.size(); ++k) {
    os << k + 1 << ',' << format_number(s.val[k].labeled) << ',' << s.val[k].seeds << ','
       << format_number(s.val[k].mean) << ',' << format_number(s.val[k].spread) << ','
       << format_number(s.test[k].mean) << ',' << format_number(s.test[k].spread) << '\n';
  }
  return os.str();
}

namespace {

std::string fixed(double v, int digits = 2) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(digits);
  os << v;
  return os.str();
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string tick_label(double v) {
  const double a = std::abs(v);
  if (a != 0.0 && (a < 1e-2 || a >= 1e5)) {
    std::ostringstream os;
    os.precision(2);
    os << std::scientific << v;
    return os.str();
  }
  return fixed(v, a < 1.0 ? 3 : (a < 100.0 ? 2 : 0));
}

}  // namespace

std::string label_rate_svg(const std::vector<Series>& series, const std::string& unit) {
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2"};
  const double width = 640, height = 420, left = 70, right = 160, top = 30, bottom = 50;
  const double pw = width - left - right, ph = height - top - bottom;

  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : series) {
    for (const auto& p : s.test) {
      xmin = std::min(xmin, p.labeled);
      xmax = std::max(xmax, p.labeled);
      ymin = std::min(ymin, p.mean - p.spread);
      ymax = std::max(ymax, p.mean + p.spread);
    }
  }
  if (!std::isfinite(xmin)) {
    xmin = 0;
    xmax = 1;
    ymin = 0;
    ymax = 1;
  }
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) ymax = ymin + 1;
  const double pad = 0.05 * (ymax - ymin);
  ymin = std::max(0.0, ymin - pad);
  ymax += pad;
  auto sx = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
  auto sy = [&](double y) { return top + (1.0 - (y - ymin) / (ymax - ymin)) * ph; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" viewBox=\"0 0 " << width << ' ' << height << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"#444\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = xmin + (xmax - xmin) * i / 4.0;
    const double yv = ymin + (ymax - ymin) * i / 4.0;
    os << "<text x=\"" << fixed(sx(xv)) << "\" y=\"" << fixed(top + ph + 16) << "\" text-anchor=\"middle\">"
       << tick_label(xv) << "</text>\n";
    os << "<text x=\"" << fixed(left - 6) << "\" y=\"" << fixed(sy(yv) + 4) << "\" text-anchor=\"end\">"
       << tick_label(yv) << "</text>\n";
    os << "<line x1=\"" << left << "\" x2=\"" << left + pw << "\" y1=\"" << fixed(sy(yv)) << "\" y2=\"" << fixed(sy(yv))
       << "\" stroke=\"#ddd\"/>\n";
  }
  os << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 12 << "\" text-anchor=\"middle\">labeled molecules</text>\n";
  os << "<text x=\"16\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << top + ph / 2
     << ")\">test MAE (" << escape_xml(unit) << ")</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* c = colors[k % (sizeof(colors) / sizeof(colors[0]))];
    if (s.test.empty()) continue;
    std::string band;
    for (const auto& p : s.test) band += fixed(sx(p.labeled)) + "," + fixed(sy(p.mean + p.spread)) + " ";
    for (auto it = s.test.rbegin(); it != s.test.rend(); ++it) {
      band += fixed(sx(it->labeled)) + "," + fixed(sy(it->mean - it->spread)) + " ";
    }
    os << "<polygon points=\"" << band << "\" fill=\"" << c << "\" fill-opacity=\"0.15\" stroke=\"none\"/>\n";
    std::string line;
    for (const auto& p : s.test) line += fixed(sx(p.labeled)) + "," + fixed(sy(p.mean)) + " ";
    os << "<polyline points=\"" << line << "\" fill=\"none\" stroke=\"" << c << "\" stroke-width=\"2\"/>\n";
    for (const auto& p : s.test) {
      os << "<circle cx=\"" << fixed(sx(p.labeled)) << "\" cy=\"" << fixed(sy(p.mean)) << "\" r=\"3\" fill=\"" << c
         << "\"/>\n";
    }
    const double ly = top + 14 + 18 * static_cast<double>(k);
    os << "<line x1=\"" << left + pw + 12 << "\" x2=\"" << left + pw + 32 << "\" y1=\"" << ly << "\" y2=\"" << ly
       << "\" stroke=\"" << c << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << left + pw + 38 << "\" y=\"" << ly + 4 << "\">" << escape_xml(s.name) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  if (!out) throw IoError("write failed: " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace asgn
