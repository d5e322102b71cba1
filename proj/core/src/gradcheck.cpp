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

#include "asgn/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace asgn {

GradCheckResult grad_check(ParameterSet& params, const LossFunction& loss, std::size_t probes_per_tensor,
                           RngStream& rng, double step) {
  params.zero_grad();
  loss(params, true);
  std::map<std::string, Tensor2, std::less<>> analytic;
  for (auto& [name, p] : params.entries()) analytic.emplace(name, p.grad);
  params.zero_grad();

  GradCheckResult result;
  for (auto& [name, p] : params.entries()) {
    const std::size_t n = p.value.size();
    const std::size_t k = std::min(n, probes_per_tensor);
    for (std::size_t idx : rng.sample_without_replacement(n, k)) {
      const double saved = p.value[idx];
      auto at = [&](double offset) {
        p.value[idx] = saved + offset;
        return loss(params, false);
      };
      const double f2 = at(2.0 * step), f1 = at(step), b1 = at(-step), b2 = at(-2.0 * step);
      p.value[idx] = saved;

      const double g_n = (-f2 + 8.0 * f1 - 8.0 * b1 + b2) / (12.0 * step);
      const double g_a = analytic.at(name)[idx];
      const double rel = std::abs(g_a - g_n) / std::max(1e-6, std::abs(g_a) + std::abs(g_n));
      ++result.probes;
      if (result.probes == 1 || rel > result.max_rel_error) {
        result.max_rel_error = rel;
        result.worst_parameter = name;
        result.worst_index = idx;
        result.analytic = g_a;
        result.numeric = g_n;
      }
    }
  }
  return result;
}

}  // namespace asgn
