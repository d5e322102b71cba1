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

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "asgn/dataset.hpp"
#include "asgn/loop.hpp"

namespace asgn {

// Declarative description of an experiment, read from "key = value" lines.
// '#' starts a comment. Unknown or repeated keys are errors.
struct RunSpec {
  std::filesystem::path data;      // directory of QM9-format .xyz files
  std::filesystem::path manifest;  // split manifest; empty: split from the seed below
  std::filesystem::path output = "asgn-out";
  std::size_t limit = 0;  // 0: every file
  std::uint64_t split_seed = 0;
  SplitSizes split{5000, 10000, 10000};
  std::vector<std::uint64_t> seeds{0};
  // Variants to run on every seed: kcenter, random, asgn, asgn-t, asgn-s,
  // asgn-no-transfer, supervised-random.
  std::vector<std::string> strategies{"kcenter"};
  bool save_state = true;
  LoopConfig loop;
};

RunSpec parse_runspec(std::string_view text, std::string_view source = "<runspec>");
RunSpec load_runspec(const std::filesystem::path& path);

// Applies one `key = value` assignment; ConfigError on unknown keys or bad values.
void set_runspec_key(RunSpec& spec, std::string_view key, std::string_view value);

// Every key with its current value, one per line, in a fixed order.
std::string format_runspec(const RunSpec& spec);

// Key reference with defaults, for --help.
std::string runspec_reference();

// LoopConfig for a named variant on top of `base`.
LoopConfig apply_variant(LoopConfig base, std::string_view variant);
bool is_known_variant(std::string_view variant);

}  // namespace asgn
