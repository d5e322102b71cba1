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

#include <span>
#include <string_view>

#include "asgn/tensor.hpp"

namespace asgn {

// Differentiable primitives with handwritten backward rules.
//
// Forward functions are pure. Backward functions take the upstream gradient
// and *accumulate* into the caller's gradient buffers, so one parameter can
// collect contributions from several uses.

enum class Activation { ShiftedSoftplus, Relu };

std::string_view to_string(Activation a);
Activation activation_from_string(std::string_view s);

// y = x W + b, x: n x din, W: din x dout, b: 1 x dout.
Tensor2 linear(const Tensor2& x, const Tensor2& W, const Tensor2& b);

// dx (optional, overwritten), dW and db accumulated.
void linear_backward(const Tensor2& x, const Tensor2& W, const Tensor2& dy, Tensor2* dx, Tensor2& dW,
                     Tensor2& db);

// ln(0.5 e^x + 0.5), overflow-safe.
double shifted_softplus(double x);
// d/dx shifted_softplus = logistic(x).
double shifted_softplus_grad(double x);

Tensor2 activate(const Tensor2& x, Activation a);
// Returns dy * act'(x), elementwise.
Tensor2 activate_backward(const Tensor2& x, const Tensor2& dy, Activation a);

struct LossGrad {
  double loss = 0.0;
  Tensor2 grad;  // d loss / d input
};

// Row-wise log-softmax via log-sum-exp.
Tensor2 log_softmax(const Tensor2& logits);

// Mean over rows of -log softmax(logits)[target]. grad = (softmax - onehot) / n.
LossGrad softmax_cross_entropy(const Tensor2& logits, std::span<const int> targets);

// Sum over columns, mean over rows, of squared error. grad = 2 (pred - target) / n.
LossGrad mse(const Tensor2& pred, const Tensor2& target);

}  // namespace asgn
