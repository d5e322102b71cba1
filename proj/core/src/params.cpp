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

#include "asgn/params.hpp"

#include <bit>
#include <cmath>

#include "asgn/errors.hpp"

namespace asgn {

Parameter& ParameterSet::add(const std::string& name, std::size_t rows, std::size_t cols) {
  if (params_.contains(name)) throw ArchitectureError("duplicate parameter '" + name + "'");
  Parameter p{Tensor2(rows, cols), Tensor2(rows, cols), Tensor2(rows, cols), Tensor2(rows, cols)};
  return params_.emplace(name, std::move(p)).first->second;
}

bool ParameterSet::contains(std::string_view name) const { return params_.find(name) != params_.end(); }

Parameter& ParameterSet::at(std::string_view name) {
  auto it = params_.find(name);
  if (it == params_.end()) throw ArchitectureError("no parameter named '" + std::string(name) + "'");
  return it->second;
}

const Parameter& ParameterSet::at(std::string_view name) const {
  auto it = params_.find(name);
  if (it == params_.end()) throw ArchitectureError("no parameter named '" + std::string(name) + "'");
  return it->second;
}

std::size_t ParameterSet::scalar_count() const {
  std::size_t n = 0;
  for (const auto& [_, p] : params_) n += p.value.size();
  return n;
}

void ParameterSet::zero_grad() {
  for (auto& [_, p] : params_) p.grad.set_zero();
}

void ParameterSet::reset_optimizer() {
  for (auto& [_, p] : params_) {
    p.first_moment.set_zero();
    p.second_moment.set_zero();
  }
  step_ = 0;
}

std::uint64_t ParameterSet::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& [name, p] : params_) {
    h = fnv1a64(name, h);
    mix(p.value.rows());
    mix(p.value.cols());
    for (double v : p.value.values()) mix(std::bit_cast<std::uint64_t>(v));
  }
  return h;
}

ParameterSet ParameterSet::subset(const std::function<bool(std::string_view)>& keep) const {
  ParameterSet out;
  for (const auto& [name, p] : params_) {
    if (!keep(name)) continue;
    out.add(name, p.value.rows(), p.value.cols()).value = p.value;
  }
  return out;
}

bool ParameterSet::values_equal(const ParameterSet& other) const {
  if (params_.size() != other.params_.size()) return false;
  auto a = params_.begin();
  auto b = other.params_.begin();
  for (; a != params_.end(); ++a, ++b) {
    if (a->first != b->first || !(a->second.value == b->second.value)) return false;
  }
  return true;
}

void adam_step(ParameterSet& params, const AdamConfig& cfg) {
  params.set_step(params.step() + 1);
  const double t = static_cast<double>(params.step());
  const double bc1 = 1.0 - std::pow(cfg.beta1, t);
  const double bc2 = 1.0 - std::pow(cfg.beta2, t);
  for (auto& [_, p] : params.entries()) {
    auto w = p.value.values();
    auto g = p.grad.values();
    auto m = p.first_moment.values();
    auto v = p.second_moment.values();
    for (std::size_t i = 0; i < w.size(); ++i) {
      m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
      v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
      const double mhat = m[i] / bc1;
      const double vhat = v[i] / bc2;
      w[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
      g[i] = 0.0;
    }
  }
}

void glorot_uniform(Tensor2& w, RngStream& rng) {
  const double a = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
  for (double& v : w.values()) v = rng.uniform(-a, a);
}

}  // namespace asgn
