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
#include <functional>
#include <map>
#include <string>
#include <string_view>

#include "asgn/rng.hpp"
#include "asgn/tensor.hpp"

namespace asgn {

struct Parameter {
  Tensor2 value;
  Tensor2 grad;
  Tensor2 first_moment;
  Tensor2 second_moment;
};

// Named learnable weights with parallel gradient and Adam buffers.
// Iteration order is lexicographic by name, which fixes every reduction
// order that walks the set.
class ParameterSet {
 public:
  Parameter& add(const std::string& name, std::size_t rows, std::size_t cols);

  bool contains(std::string_view name) const;
  Parameter& at(std::string_view name);
  const Parameter& at(std::string_view name) const;
  const Tensor2& value(std::string_view name) const { return at(name).value; }
  Tensor2& value(std::string_view name) { return at(name).value; }
  Tensor2& grad(std::string_view name) { return at(name).grad; }

  std::map<std::string, Parameter, std::less<>>& entries() { return params_; }
  const std::map<std::string, Parameter, std::less<>>& entries() const { return params_; }

  std::size_t size() const { return params_.size(); }
  std::size_t scalar_count() const;

  void zero_grad();
  // Drops optimizer moments and resets the step counter.
  void reset_optimizer();

  std::uint64_t step() const noexcept { return step_; }
  void set_step(std::uint64_t s) noexcept { step_ = s; }

  // FNV-1a over names, shapes and the bit patterns of the values.
  std::uint64_t hash() const;

  // Copies values of entries accepted by `keep` into a fresh set with zeroed
  // gradients and optimizer state.
  ParameterSet subset(const std::function<bool(std::string_view)>& keep) const;

  bool values_equal(const ParameterSet& other) const;

 private:
  std::map<std::string, Parameter, std::less<>> params_;
  std::uint64_t step_ = 0;
};

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Bias-corrected Adam over every entry, then zeroes the gradients.
void adam_step(ParameterSet& params, const AdamConfig& cfg);

// Glorot-uniform: U(-a, a), a = sqrt(6 / (rows + cols)).
void glorot_uniform(Tensor2& w, RngStream& rng);

}  // namespace asgn
