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

#include <charconv>
#include <fstream>
#include <sstream>

#include "asgn/errors.hpp"
#include "asgn/loop.hpp"

namespace asgn {

namespace {

constexpr std::string_view kStateHeader = "# asgn loop state v1";

std::string join_ids(std::span<const std::size_t> ids) {
  std::string s;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(ids[i]);
  }
  return s;
}

std::vector<std::size_t> split_ids(std::string_view text) {
  std::vector<std::size_t> out;
  while (!text.empty()) {
    const std::size_t comma = text.find(',');
    const std::string_view tok = text.substr(0, comma);
    std::size_t v = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || p != tok.data() + tok.size()) throw IoError("loop state: bad id '" + std::string(tok) + "'");
    out.push_back(v);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

std::size_t to_size(std::string_view s) {
  std::size_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw IoError("loop state: bad integer '" + std::string(s) + "'");
  return v;
}

double one_double(std::string_view s) {
  const auto v = decode_doubles(s);
  if (v.size() != 1) throw IoError("loop state: expected one number, got '" + std::string(s) + "'");
  return v.front();
}

std::vector<std::string_view> fields(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i <= s.size()) {
    const std::size_t sp = s.find(' ', i);
    out.push_back(s.substr(i, sp == std::string_view::npos ? std::string_view::npos : sp - i));
    if (sp == std::string_view::npos) break;
    i = sp + 1;
  }
  return out;
}

Checkpoint params_checkpoint(const ParameterSet& p, const AtomVocabulary& vocab, const FilterGrid& grid,
                             std::uint64_t hash) {
  Checkpoint c;
  c.vocabulary = vocab.symbols();
  c.grid = grid;
  c.config_hash = hash;
  c.params = p;
  c.include_optimizer = true;
  return c;
}

}  // namespace

void AsgnRun::save_state(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  const std::uint64_t hash = cfg_.hash();
  save_checkpoint(params_checkpoint(teacher_, data_.vocabulary(), cfg_.backbone.grid, hash), dir / "teacher.ckpt");
  if (student_) {
    save_checkpoint(params_checkpoint(*student_, data_.vocabulary(), cfg_.backbone.grid, hash), dir / "student.ckpt");
  } else {
    std::filesystem::remove(dir / "student.ckpt");
  }

  std::ostringstream os;
  os << kStateHeader << '\n';
  os << "config_hash " << hash << '\n';
  os << "seed " << seed_ << '\n';
  os << "data_hash " << data_.content_hash() << '\n';
  os << "iteration " << iteration_ << '\n';
  os << "oracle_queries " << oracle_queries_ << '\n';
  os << "initial_labeled " << initial_labeled_ << '\n';
  os << "finished " << (finished_ ? 1 : 0) << '\n';
  os << "norm_mean " << encode_doubles(norm_.mean) << '\n';
  os << "norm_std " << encode_doubles(norm_.stddev) << '\n';
  const auto& pools = data_.pools();
  os << "labeled " << join_ids(pools.labeled) << '\n';
  os << "unlabeled " << join_ids(pools.unlabeled) << '\n';
  os << "validation " << join_ids(pools.validation) << '\n';
  os << "test " << join_ids(pools.test) << '\n';
  os << "pseudo_version " << pseudo_.student_version << '\n';
  for (const auto& [id, y] : pseudo_.labels) os << "pseudo " << id << ' ' << encode_doubles(y) << '\n';
  for (const auto& r : history_.iterations) {
    os << "record " << r.iteration << ' ' << r.labeled_count << ' ' << r.selected << ' ' << r.student_best_epoch
       << ' ' << r.student_epochs << ' ' << encode_doubles(std::vector<double>{r.radius_max, r.radius_mean, r.radius_min, r.wall_seconds})
       << ' ' << encode_doubles(r.val_mae) << ' ' << encode_doubles(r.test_mae) << ' '
       << encode_doubles(r.student_val_curve) << '\n';
    for (const auto& e : r.teacher_curve) {
      os << "teacher " << r.iteration << ' ' << e.sinkhorn_sweeps << ' ' << (e.sinkhorn_converged ? 1 : 0) << ' '
         << encode_doubles(std::vector<double>{e.property, e.recon, e.cluster, e.total}) << '\n';
    }
  }
  for (const auto& s : selection_log_) {
    os << "pick " << s.iteration << ' ' << s.order << ' ' << s.molecule << ' '
       << encode_doubles(std::vector<double>{s.radius}) << '\n';
  }
  os << "end\n";

  const auto tmp = dir / "state.txt.tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << os.str();
    if (!out) throw IoError("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, dir / "state.txt");
}

void AsgnRun::load_state(const std::filesystem::path& dir) {
  const auto path = dir / "state.txt";
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kStateHeader) throw IoError(path.string() + ": not a loop state file");

  PoolAssignment pools;
  PseudoLabelTable pseudo;
  MetricHistory history;
  std::vector<SelectionLogEntry> picks;
  NormStats norm;
  std::size_t iteration = 0, queries = 0, initial = 0;
  bool finished = false, ended = false;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line == "end") {
      ended = true;
      break;
    }
    const std::size_t sp = line.find(' ');
    const std::string key = line.substr(0, sp);
    const std::string_view rest = sp == std::string::npos ? std::string_view{} : std::string_view(line).substr(sp + 1);
    try {
      if (key == "config_hash") {
        if (std::to_string(cfg_.hash()) != rest) throw ConfigError(path.string() + ": saved with a different configuration");
      } else if (key == "seed") {
        if (std::to_string(seed_) != rest) throw ConfigError(path.string() + ": saved with seed " + std::string(rest));
      } else if (key == "data_hash") {
        if (std::to_string(data_.content_hash()) != rest) throw ConfigError(path.string() + ": saved for a different dataset");
      } else if (key == "iteration") {
        iteration = to_size(rest);
      } else if (key == "oracle_queries") {
        queries = to_size(rest);
      } else if (key == "initial_labeled") {
        initial = to_size(rest);
      } else if (key == "finished") {
        finished = rest == "1";
      } else if (key == "norm_mean") {
        norm.mean = decode_doubles(rest);
      } else if (key == "norm_std") {
        norm.stddev = decode_doubles(rest);
      } else if (key == "labeled") {
        pools.labeled = split_ids(rest);
      } else if (key == "unlabeled") {
        pools.unlabeled = split_ids(rest);
      } else if (key == "validation") {
        pools.validation = split_ids(rest);
      } else if (key == "test") {
        pools.test = split_ids(rest);
      } else if (key == "pseudo_version") {
        pseudo.student_version = std::stoull(std::string(rest));
      } else if (key == "pseudo") {
        const auto f = fields(rest);
        if (f.size() != 2) throw IoError("bad pseudo line");
        pseudo.labels[to_size(f[0])] = decode_doubles(f[1]);
      } else if (key == "record") {
        const auto f = fields(rest);
        if (f.size() != 9) throw IoError("bad record line");
        IterationRecord r;
        r.iteration = to_size(f[0]);
        r.labeled_count = to_size(f[1]);
        r.selected = to_size(f[2]);
        r.student_best_epoch = to_size(f[3]);
        r.student_epochs = to_size(f[4]);
        const auto radius = decode_doubles(f[5]);
        if (radius.size() != 4) throw IoError("bad record radius field");
        r.radius_max = radius[0];
        r.radius_mean = radius[1];
        r.radius_min = radius[2];
        r.wall_seconds = radius[3];
        r.val_mae = decode_doubles(f[6]);
        r.test_mae = decode_doubles(f[7]);
        r.student_val_curve = decode_doubles(f[8]);
        history.iterations.push_back(std::move(r));
      } else if (key == "teacher") {
        const auto f = fields(rest);
        if (f.size() != 4 || history.iterations.empty() || to_size(f[0]) != history.iterations.back().iteration) {
          throw IoError("bad teacher line");
        }
        TeacherEpochStats e;
        e.sinkhorn_sweeps = to_size(f[1]);
        e.sinkhorn_converged = f[2] == "1";
        const auto v = decode_doubles(f[3]);
        if (v.size() != 4) throw IoError("bad teacher losses");
        e.property = v[0];
        e.recon = v[1];
        e.cluster = v[2];
        e.total = v[3];
        history.iterations.back().teacher_curve.push_back(e);
      } else if (key == "pick") {
        const auto f = fields(rest);
        if (f.size() != 4) throw IoError("bad pick line");
        picks.push_back({to_size(f[0]), to_size(f[1]), to_size(f[2]), one_double(f[3])});
      } else {
        throw IoError("unknown key '" + key + "'");
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw IoError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (!ended) throw IoError(path.string() + ": truncated state file");

  Checkpoint tc = load_checkpoint(dir / "teacher.ckpt");
  if (tc.config_hash != cfg_.hash()) throw ConfigError("teacher checkpoint was saved with a different configuration");
  std::optional<ParameterSet> student;
  if (std::filesystem::exists(dir / "student.ckpt")) {
    Checkpoint sc = load_checkpoint(dir / "student.ckpt");
    if (sc.config_hash != cfg_.hash()) throw ConfigError("student checkpoint was saved with a different configuration");
    student = std::move(sc.params);
  }
  for (const auto& [name, p] : teacher_.entries()) {
    if (!tc.params.contains(name) || !tc.params.value(name).same_shape(p.value)) {
      throw ArchitectureError("teacher checkpoint does not match the configured model at '" + name + "'");
    }
  }

  data_.assign_pools(pools);
  teacher_ = std::move(tc.params);
  student_ = std::move(student);
  pseudo_ = std::move(pseudo);
  history_ = std::move(history);
  selection_log_ = std::move(picks);
  norm_ = std::move(norm);
  iteration_ = iteration;
  oracle_queries_ = queries;
  initial_labeled_ = initial;
  finished_ = finished;
}

}  // namespace asgn
