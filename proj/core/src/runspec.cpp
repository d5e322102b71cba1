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

#include "asgn/runspec.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "asgn/errors.hpp"

namespace asgn {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  while (true) {
    const auto comma = s.find(',');
    const auto item = trim(s.substr(0, comma));
    if (!item.empty()) out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

template <typename T>
T parse_unsigned(std::string_view key, std::string_view v) {
  T out{};
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) {
    throw ConfigError("'" + std::string(key) + "': expected a non-negative integer, got '" + std::string(v) + "'");
  }
  return out;
}

double parse_real(std::string_view key, std::string_view v) {
  double out = 0.0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size() || !std::isfinite(out)) {
    throw ConfigError("'" + std::string(key) + "': expected a number, got '" + std::string(v) + "'");
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("'" + std::string(key) + "': expected true or false, got '" + std::string(v) + "'");
}

std::string real(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string boolean(bool b) { return b ? "true" : "false"; }

template <typename T>
std::string join(const std::vector<T>& items) {
  std::ostringstream os;
  for (std::size_t i = 0; i < items.size(); ++i) os << (i ? "," : "") << items[i];
  return os.str();
}

struct Key {
  const char* name;
  const char* help;
  std::function<void(RunSpec&, std::string_view)> set;
  std::function<std::string(const RunSpec&)> get;
};

#define ASGN_SIZE_KEY(NAME, FIELD, HELP)                                                                    \
  Key {                                                                                                     \
    NAME, HELP, [](RunSpec& s, std::string_view v) { s.FIELD = parse_unsigned<std::size_t>(NAME, v); },    \
        [](const RunSpec& s) { return std::to_string(s.FIELD); }                                            \
  }
#define ASGN_REAL_KEY(NAME, FIELD, HELP)                                                                    \
  Key {                                                                                                     \
    NAME, HELP, [](RunSpec& s, std::string_view v) { s.FIELD = parse_real(NAME, v); },                      \
        [](const RunSpec& s) { return real(s.FIELD); }                                                      \
  }
#define ASGN_BOOL_KEY(NAME, FIELD, HELP)                                                                    \
  Key {                                                                                                     \
    NAME, HELP, [](RunSpec& s, std::string_view v) { s.FIELD = parse_bool(NAME, v); },                      \
        [](const RunSpec& s) { return boolean(s.FIELD); }                                                   \
  }

const std::vector<Key>& keys() {
  static const std::vector<Key> table = {
      {"data", "dataset directory of QM9-format .xyz files (ASGN_DATA_ROOT overrides)",
       [](RunSpec& s, std::string_view v) { s.data = std::string(v); },
       [](const RunSpec& s) { return s.data.string(); }},
      {"manifest", "split manifest from `prepare`; empty: split with split_seed",
       [](RunSpec& s, std::string_view v) { s.manifest = std::string(v); },
       [](const RunSpec& s) { return s.manifest.string(); }},
      {"output", "output directory", [](RunSpec& s, std::string_view v) { s.output = std::string(v); },
       [](const RunSpec& s) { return s.output.string(); }},
      ASGN_SIZE_KEY("limit", limit, "read at most this many files (0: all)"),
      {"split_seed", "seed of the pool split",
       [](RunSpec& s, std::string_view v) { s.split_seed = parse_unsigned<std::uint64_t>("split_seed", v); },
       [](const RunSpec& s) { return std::to_string(s.split_seed); }},
      ASGN_SIZE_KEY("labeled", split.labeled, "initial labeled pool size"),
      ASGN_SIZE_KEY("validation", split.validation, "validation pool size"),
      ASGN_SIZE_KEY("test", split.test, "test pool size"),
      {"seeds", "comma-separated run seeds",
       [](RunSpec& s, std::string_view v) {
         s.seeds.clear();
         for (const auto& item : split_list(v)) s.seeds.push_back(parse_unsigned<std::uint64_t>("seeds", item));
         if (s.seeds.empty()) throw ConfigError("'seeds': at least one seed is required");
       },
       [](const RunSpec& s) { return join(s.seeds); }},
      {"strategies",
       "comma-separated variants: kcenter, random, asgn, asgn-t, asgn-s, asgn-no-transfer, supervised-random",
       [](RunSpec& s, std::string_view v) {
         s.strategies = split_list(v);
         if (s.strategies.empty()) throw ConfigError("'strategies': at least one variant is required");
         std::set<std::string> seen;
         for (const auto& name : s.strategies) {
           if (!is_known_variant(name)) throw ConfigError("'strategies': unknown variant '" + name + "'");
           if (!seen.insert(name).second) throw ConfigError("'strategies': variant '" + name + "' listed twice");
         }
       },
       [](const RunSpec& s) { return join(s.strategies); }},
      ASGN_BOOL_KEY("save_state", save_state, "keep per-iteration resume state"),
      {"properties", "comma-separated target properties (QM9 names, e.g. homo,lumo)",
       [](RunSpec& s, std::string_view v) {
         s.loop.properties = split_list(v);
         if (s.loop.properties.empty()) throw ConfigError("'properties': at least one property is required");
       },
       [](const RunSpec& s) { return join(s.loop.properties); }},
      ASGN_SIZE_KEY("dim", loop.backbone.dim, "embedding width d"),
      ASGN_SIZE_KEY("layers", loop.backbone.layers, "message-passing layers L"),
      ASGN_SIZE_KEY("head_hidden", loop.backbone.head_hidden, "property head hidden width (0: d)"),
      {"readout", "graph readout: mean or sum",
       [](RunSpec& s, std::string_view v) { s.loop.backbone.readout = readout_from_string(v); },
       [](const RunSpec& s) { return std::string(to_string(s.loop.backbone.readout)); }},
      {"activation", "activation: ssp or relu",
       [](RunSpec& s, std::string_view v) { s.loop.backbone.activation = activation_from_string(v); },
       [](const RunSpec& s) { return std::string(to_string(s.loop.backbone.activation)); }},
      ASGN_REAL_KEY("grid_start", loop.backbone.grid.start, "first RBF center (angstrom)"),
      ASGN_REAL_KEY("grid_stop", loop.backbone.grid.stop, "last RBF center (angstrom)"),
      ASGN_REAL_KEY("grid_step", loop.backbone.grid.step, "RBF center spacing (angstrom)"),
      ASGN_REAL_KEY("grid_gamma", loop.backbone.grid.gamma, "RBF width gamma"),
      ASGN_REAL_KEY("recon_alpha", loop.recon_alpha, "fraction of edges sampled for reconstruction"),
      ASGN_SIZE_KEY("recon_bins", loop.binning.bins, "distance classes for edge reconstruction"),
      ASGN_REAL_KEY("recon_dmax", loop.binning.d_max, "upper edge of the distance bins (angstrom)"),
      ASGN_SIZE_KEY("clusters", loop.clusters, "number of self-label clusters M"),
      ASGN_REAL_KEY("sinkhorn_lambda", loop.sinkhorn.lambda, "Sinkhorn inverse temperature"),
      ASGN_REAL_KEY("sinkhorn_tolerance", loop.sinkhorn.tolerance, "Sinkhorn marginal tolerance"),
      ASGN_SIZE_KEY("sinkhorn_max_sweeps", loop.sinkhorn.max_sweeps, "Sinkhorn sweep cap"),
      ASGN_REAL_KEY("lr", loop.adam.lr, "Adam learning rate"),
      ASGN_REAL_KEY("adam_beta1", loop.adam.beta1, "Adam beta1"),
      ASGN_REAL_KEY("adam_beta2", loop.adam.beta2, "Adam beta2"),
      ASGN_REAL_KEY("adam_eps", loop.adam.eps, "Adam epsilon"),
      ASGN_SIZE_KEY("minibatch", loop.minibatch, "molecules per minibatch"),
      ASGN_REAL_KEY("weight_property", loop.weights.property, "weight of the property loss"),
      ASGN_REAL_KEY("weight_recon", loop.weights.recon, "weight of the reconstruction loss"),
      ASGN_REAL_KEY("weight_cluster", loop.weights.cluster, "weight of the clustering loss"),
      {"property_reduction", "property loss over molecules: mean or sum",
       [](RunSpec& s, std::string_view v) {
         if (v == "mean") s.loop.property_sum = false;
         else if (v == "sum") s.loop.property_sum = true;
         else throw ConfigError("'property_reduction': expected mean or sum, got '" + std::string(v) + "'");
       },
       [](const RunSpec& s) { return std::string(s.loop.property_sum ? "sum" : "mean"); }},
      ASGN_SIZE_KEY("first_teacher_epochs", loop.first_teacher_epochs, "teacher epochs in the first iteration"),
      ASGN_SIZE_KEY("teacher_epochs", loop.teacher_epochs, "teacher epochs in later iterations"),
      ASGN_SIZE_KEY("student_patience", loop.student_patience, "student early-stopping patience (epochs)"),
      ASGN_SIZE_KEY("student_max_epochs", loop.student_max_epochs, "student epoch cap per iteration"),
      ASGN_SIZE_KEY("batch_size", loop.batch_size, "molecules selected per iteration b"),
      ASGN_SIZE_KEY("budget", loop.budget, "label budget B"),
      ASGN_REAL_KEY("stop_error", loop.stop_error, "stop once validation MAE of the first property is <= this"),
      ASGN_BOOL_KEY("disable_teacher", loop.disable_teacher, "skip teacher training"),
      ASGN_BOOL_KEY("disable_student", loop.disable_student, "evaluate the teacher, no student"),
      ASGN_BOOL_KEY("disable_transfer", loop.disable_transfer, "re-initialize the student every iteration"),
  };
  return table;
}

#undef ASGN_SIZE_KEY
#undef ASGN_REAL_KEY
#undef ASGN_BOOL_KEY

}  // namespace

void set_runspec_key(RunSpec& spec, std::string_view key, std::string_view value) {
  for (const auto& k : keys()) {
    if (key == k.name) {
      k.set(spec, value);
      return;
    }
  }
  throw ConfigError("unknown key '" + std::string(key) + "'");
}

RunSpec parse_runspec(std::string_view text, std::string_view source) {
  RunSpec spec;
  std::set<std::string, std::less<>> seen;
  std::size_t lineno = 0;
  while (!text.empty()) {
    ++lineno;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = std::string(source) + ":" + std::to_string(lineno) + ": ";
    if (eq == std::string_view::npos) throw ConfigError(where + "expected 'key = value'");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (!seen.insert(std::string(key)).second) throw ConfigError(where + "key '" + std::string(key) + "' set twice");
    try {
      set_runspec_key(spec, key, value);
    } catch (const Error& e) {
      throw ConfigError(where + e.what());
    }
  }
  return spec;
}

RunSpec load_runspec(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open run spec " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_runspec(ss.str(), path.string());
}

std::string format_runspec(const RunSpec& spec) {
  std::string out;
  for (const auto& k : keys()) out += std::string(k.name) + " = " + k.get(spec) + "\n";
  return out;
}

std::string runspec_reference() {
  const RunSpec defaults;
  std::ostringstream os;
  os << "Run spec keys (key = value, '#' comments):\n";
  for (const auto& k : keys()) {
    std::string head = std::string("  ") + k.name;
    os << head << std::string(head.size() < 24 ? 24 - head.size() : 1, ' ') << k.help << " [default: " << k.get(defaults)
       << "]\n";
  }
  return os.str();
}

bool is_known_variant(std::string_view v) {
  for (std::string_view known :
       {"kcenter", "random", "asgn", "asgn-t", "asgn-s", "asgn-no-transfer", "supervised-random"}) {
    if (v == known) return true;
  }
  return false;
}

LoopConfig apply_variant(LoopConfig cfg, std::string_view v) {
  if (v == "kcenter") {
    cfg.strategy = Strategy::KCenter;
  } else if (v == "random") {
    cfg.strategy = Strategy::Random;
  } else if (v == "asgn" || v == "asgn-t" || v == "asgn-s" || v == "asgn-no-transfer") {
    cfg.strategy = Strategy::KCenter;
    cfg.disable_student = v == "asgn-t";
    cfg.disable_teacher = v == "asgn-s";
    cfg.disable_transfer = v == "asgn-no-transfer";
  } else if (v == "supervised-random") {
    cfg.strategy = Strategy::Random;
    cfg.disable_teacher = true;
    cfg.disable_student = false;
    cfg.disable_transfer = true;
  } else {
    throw ConfigError("unknown variant '" + std::string(v) + "'");
  }
  return cfg;
}

}  // namespace asgn
