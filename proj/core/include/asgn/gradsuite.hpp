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
#include <string>
#include <vector>

#include "asgn/gradcheck.hpp"
#include "asgn/molgraph.hpp"
#include "asgn/rng.hpp"

namespace asgn {

// Random molecule with 2..max_atoms atoms of codes [0, vocab_size), atoms at
// least min_separation apart inside a cube of side `box`.
MolecularGraph random_molecule(RngStream& rng, std::size_t max_atoms, std::size_t vocab_size,
                               double box = 3.0, double min_separation = 0.9);

struct GradSuiteEntry {
  std::string name;
  bool composed = false;
  double threshold = 0.0;
  GradCheckResult result;

  bool passed() const { return result.max_rel_error < threshold; }
};

struct GradSuiteOptions {
  std::uint64_t seed = 0;
  std::size_t probes = 24;    // per parameter tensor
  std::size_t molecules = 4;  // batch size of the composed checks
  std::size_t max_atoms = 6;
  std::size_t dim = 16;
  double primitive_threshold = 1e-6;
  double composed_threshold = 1e-4;
};

// Finite-difference checks of every differentiable primitive in isolation
// and of the property, reconstruction and clustering losses and their sum.
std::vector<GradSuiteEntry> run_grad_suite(const GradSuiteOptions& opts);

}  // namespace asgn
