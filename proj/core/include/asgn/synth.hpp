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
#include <vector>

#include "asgn/molgraph.hpp"

namespace asgn {

// Generator for QM9-format stand-in data when the real dataset is not
// available. Molecules are random trees of C/N/O/F saturated with hydrogen,
// drawn from a few composition families with skewed frequencies. HOMO is a
// smooth maximum of per-atom orbital energies that depend on the local
// environment, so it is learnable by a distance-based network; the other
// fourteen properties are cheap physically-flavoured fillers.
struct SynthOptions {
  std::size_t count = 2000;
  std::size_t min_heavy = 2;
  std::size_t max_heavy = 9;
  std::uint64_t seed = 0;
  double label_noise = 2e-4;  // Hartree, on HOMO/LUMO
};

std::vector<Qm9Record> synthesize_qm9(const SynthOptions& opts);

// Writes dsgdb9nsd_NNNNNN.xyz files; returns how many were written.
std::size_t write_synthetic_dataset(const SynthOptions& opts, const std::filesystem::path& dir);

}  // namespace asgn
