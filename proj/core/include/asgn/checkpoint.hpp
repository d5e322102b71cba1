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
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "asgn/dataset.hpp"
#include "asgn/mpgnn.hpp"
#include "asgn/params.hpp"

namespace asgn {

// Self-describing binary checkpoint. All integers little-endian, doubles as
// IEEE-754 binary64 bit patterns, strings as u32 length + bytes:
//
//   "ASGNCKPT"                 8-byte magic
//   u32 version                currently 1
//   u64 config_hash
//   u32 n, n x string          atom-type vocabulary, code order
//   4 x f64                    filter grid start, stop, step, gamma
//   u32 n, n x (string, string) metadata key/value pairs, key order
//   u64 optimizer step
//   u8  has_optimizer_state
//   u32 n, n x parameter       name-ordered:
//        string name, u64 rows, u64 cols, rows*cols f64 values,
//        [rows*cols f64 first moment, rows*cols f64 second moment]
//   u64 FNV-1a of every preceding byte
//
// Save/load is bit-exact.
struct Checkpoint {
  std::vector<std::string> vocabulary;
  FilterGrid grid;
  std::uint64_t config_hash = 0;
  std::map<std::string, std::string> metadata;
  ParameterSet params;
  bool include_optimizer = false;
};

std::string serialize_checkpoint(const Checkpoint& ckpt);
Checkpoint deserialize_checkpoint(std::string_view bytes, std::string_view source = "<memory>");
void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

// Round-trip-exact text form of doubles (hex float), comma separated.
std::string encode_doubles(std::span<const double> values);
std::vector<double> decode_doubles(std::string_view text);

// A trained property model with everything needed to use it standalone.
struct ModelBundle {
  BackboneConfig backbone;
  AtomVocabulary vocabulary;
  NormStats norm;
  std::vector<std::string> properties;
  ParameterSet params;
};

Checkpoint to_checkpoint(const ModelBundle& model, std::uint64_t config_hash, bool include_optimizer = false);
// Throws ArchitectureError if the stored shapes disagree with the stored config.
ModelBundle from_checkpoint(const Checkpoint& ckpt);

}  // namespace asgn
