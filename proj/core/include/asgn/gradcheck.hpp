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
#include <functional>
#include <string>

#include "asgn/params.hpp"
#include "asgn/rng.hpp"

namespace asgn {

// Evaluates the loss at the current parameter values. When `with_grad` is set
// it must also accumulate the analytic gradient into params' grad buffers.
using LossFunction = std::function<double(ParameterSet& params, bool with_grad)>;

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string worst_parameter;
  std::size_t worst_index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  std::size_t probes = 0;
};

// Finite-difference check of the analytic gradient at `probes_per_tensor`
// random coordinates of every parameter tensor, using the five-point stencil
//   g_n = (-f(x+2h) + 8 f(x+h) - 8 f(x-h) + f(x-2h)) / 12h
// and the relative error |g_a - g_n| / max(1e-6, |g_a| + |g_n|); the floor keeps
// exactly-zero gradients from being judged against stencil round-off.
GradCheckResult grad_check(ParameterSet& params, const LossFunction& loss, std::size_t probes_per_tensor,
                           RngStream& rng, double step = 1e-3);

}  // namespace asgn
