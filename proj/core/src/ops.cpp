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

#include "asgn/ops.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "asgn/errors.hpp"

namespace asgn {

std::string_view to_string(Activation a) {
  switch (a) {
    case Activation::ShiftedSoftplus:
      return "ssp";
    case Activation::Relu:
      return "relu";
  }
  return "?";
}

Activation activation_from_string(std::string_view s) {
  if (s == "ssp" || s == "shifted_softplus") return Activation::ShiftedSoftplus;
  if (s == "relu") return Activation::Relu;
  throw ConfigError("unknown activation '" + std::string(s) + "' (expected ssp or relu)");
}

Tensor2 linear(const Tensor2& x, const Tensor2& W, const Tensor2& b) {
  if (x.cols() != W.rows()) {
    throw ShapeError("linear: input has " + std::to_string(x.cols()) + " columns, weight expects " +
                     std::to_string(W.rows()));
  }
  require_shape(b, 1, W.cols(), "linear bias");
  Tensor2 y = matmul(x, W);
  for (std::size_t r = 0; r < y.rows(); ++r) {
    auto row = y.row(r);
    for (std::size_t c = 0; c < y.cols(); ++c) row[c] += b[c];
  }
  check_finite(y, "linear");
  return y;
}

void linear_backward(const Tensor2& x, const Tensor2& W, const Tensor2& dy, Tensor2* dx, Tensor2& dW,
                     Tensor2& db) {
  require_shape(dy, x.rows(), W.cols(), "linear_backward upstream");
  matmul_tn_acc(x, dy, dW);
  colsum_acc(dy, db);
  if (dx != nullptr) *dx = matmul_nt(dy, W);
}

double shifted_softplus(double x) {
  // softplus(x) - ln 2 with softplus(x) = max(x, 0) + log1p(exp(-|x|)).
  return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))) - std::numbers::ln2;
}

double shifted_softplus_grad(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

Tensor2 activate(const Tensor2& x, Activation a) {
  Tensor2 y(x.rows(), x.cols());
  const auto in = x.values();
  auto out = y.values();
  if (a == Activation::ShiftedSoftplus) {
    for (std::size_t i = 0; i < in.size(); ++i) out[i] = shifted_softplus(in[i]);
  } else {
    for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[i] > 0.0 ? in[i] : 0.0;
  }
  check_finite(y, "activation");
  return y;
}

Tensor2 activate_backward(const Tensor2& x, const Tensor2& dy, Activation a) {
  if (!x.same_shape(dy)) throw ShapeError("activate_backward: shape mismatch");
  Tensor2 dx(x.rows(), x.cols());
  const auto in = x.values();
  const auto up = dy.values();
  auto out = dx.values();
  if (a == Activation::ShiftedSoftplus) {
    for (std::size_t i = 0; i < in.size(); ++i) out[i] = up[i] * shifted_softplus_grad(in[i]);
  } else {
    for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[i] > 0.0 ? up[i] : 0.0;
  }
  return dx;
}

Tensor2 log_softmax(const Tensor2& logits) {
  Tensor2 out(logits.rows(), logits.cols());
  for (std::size_t r = 0; r < logits.rows(); ++r) {
    const auto in = logits.row(r);
    auto o = out.row(r);
    const double mx = *std::max_element(in.begin(), in.end());
    double s = 0.0;
    for (double v : in) s += std::exp(v - mx);
    const double lse = mx + std::log(s);
    for (std::size_t c = 0; c < in.size(); ++c) o[c] = in[c] - lse;
  }
  check_finite(out, "log_softmax");
  return out;
}

LossGrad softmax_cross_entropy(const Tensor2& logits, std::span<const int> targets) {
  const std::size_t n = logits.rows();
  const std::size_t k = logits.cols();
  if (k < 2) throw ShapeError("softmax_cross_entropy: need at least 2 classes");
  if (targets.size() != n) {
    throw ShapeError("softmax_cross_entropy: " + std::to_string(targets.size()) + " targets for " +
                     std::to_string(n) + " rows");
  }
  LossGrad out;
  out.grad = Tensor2(n, k);
  if (n == 0) return out;
  const Tensor2 logp = log_softmax(logits);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t r = 0; r < n; ++r) {
    const int t = targets[r];
    if (t < 0 || static_cast<std::size_t>(t) >= k) {
      throw ShapeError("softmax_cross_entropy: target " + std::to_string(t) + " outside [0, " +
                       std::to_string(k) + ")");
    }
    out.loss -= logp(r, static_cast<std::size_t>(t));
    auto g = out.grad.row(r);
    for (std::size_t c = 0; c < k; ++c) g[c] = std::exp(logp(r, c)) * inv_n;
    g[static_cast<std::size_t>(t)] -= inv_n;
  }
  out.loss *= inv_n;
  check_finite(out.loss, "softmax_cross_entropy");
  return out;
}

LossGrad mse(const Tensor2& pred, const Tensor2& target) {
  if (!pred.same_shape(target)) throw ShapeError("mse: prediction and target shapes differ");
  LossGrad out;
  out.grad = Tensor2(pred.rows(), pred.cols());
  if (pred.rows() == 0) return out;
  const double inv_n = 1.0 / static_cast<double>(pred.rows());
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - target[i];
    out.loss += d * d;
    out.grad[i] = 2.0 * d * inv_n;
  }
  out.loss *= inv_n;
  check_finite(out.loss, "mse");
  return out;
}

}  // namespace asgn
