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

#include "asgn/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "asgn/errors.hpp"

namespace asgn {

namespace {

std::string shape_str(const Tensor2& t) {
  return std::to_string(t.rows()) + "x" + std::to_string(t.cols());
}

}  // namespace

Tensor2::Tensor2(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Tensor2::Tensor2(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) {
    throw ShapeError("Tensor2: data length " + std::to_string(data_.size()) + " does not match " +
                     std::to_string(rows) + "x" + std::to_string(cols));
  }
}

Tensor2 Tensor2::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  Tensor2 t(r, c);
  std::size_t i = 0;
  for (const auto& row : rows) {
    if (row.size() != c) throw ShapeError("Tensor2::from_rows: ragged rows");
    std::copy(row.begin(), row.end(), t.data_.begin() + static_cast<std::ptrdiff_t>(i * c));
    ++i;
  }
  return t;
}

Tensor2 Tensor2::row_vector(std::span<const double> values) {
  return Tensor2(1, values.size(), std::vector<double>(values.begin(), values.end()));
}

void Tensor2::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

bool Tensor2::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Tensor2& Tensor2::operator+=(const Tensor2& other) {
  if (!same_shape(other)) throw ShapeError("Tensor2 +=: " + shape_str(*this) + " vs " + shape_str(other));
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

Tensor2& Tensor2::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

// The kernels below accumulate every output entry over the inner index in
// ascending order; vectorization runs across output columns only, so results
// do not depend on memory alignment.

namespace {

// out[i, :] += sum_p a[i, p] * b[p, :]
void gemm_acc(const double* a, const double* b, double* out, std::size_t n, std::size_t k, std::size_t m) {
  for (std::size_t i = 0; i < n; ++i) {
    double* __restrict o = out + i * m;
    const double* ai = a + i * k;
    for (std::size_t p = 0; p < k; ++p) {
      const double s = ai[p];
      const double* __restrict bp = b + p * m;
      for (std::size_t j = 0; j < m; ++j) o[j] += s * bp[j];
    }
  }
}

}  // namespace

Tensor2 matmul(const Tensor2& a, const Tensor2& b) {
  if (a.cols() != b.rows()) throw ShapeError("matmul: " + shape_str(a) + " * " + shape_str(b));
  Tensor2 out(a.rows(), b.cols());
  gemm_acc(a.data(), b.data(), out.data(), a.rows(), a.cols(), b.cols());
  return out;
}

Tensor2 matmul_nt(const Tensor2& a, const Tensor2& b) {
  if (a.cols() != b.cols()) throw ShapeError("matmul_nt: " + shape_str(a) + " * " + shape_str(b) + "^T");
  Tensor2 bt(b.cols(), b.rows());
  for (std::size_t r = 0; r < b.rows(); ++r) {
    for (std::size_t c = 0; c < b.cols(); ++c) bt(c, r) = b(r, c);
  }
  Tensor2 out(a.rows(), b.rows());
  gemm_acc(a.data(), bt.data(), out.data(), a.rows(), a.cols(), b.rows());
  return out;
}

void matmul_tn_acc(const Tensor2& a, const Tensor2& b, Tensor2& out) {
  if (a.rows() != b.rows() || out.rows() != a.cols() || out.cols() != b.cols()) {
    throw ShapeError("matmul_tn_acc: " + shape_str(a) + "^T * " + shape_str(b) + " -> " + shape_str(out));
  }
  const std::size_t m = b.cols();
  for (std::size_t r = 0; r < a.rows(); ++r) {
    const double* ar = a.data() + r * a.cols();
    const double* __restrict br = b.data() + r * m;
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double s = ar[i];
      double* __restrict o = out.data() + i * m;
      for (std::size_t j = 0; j < m; ++j) o[j] += s * br[j];
    }
  }
}

void colsum_acc(const Tensor2& a, Tensor2& out) {
  if (out.rows() != 1 || out.cols() != a.cols()) {
    throw ShapeError("colsum_acc: " + shape_str(a) + " -> " + shape_str(out));
  }
  // Fixed row order.
  for (std::size_t r = 0; r < a.rows(); ++r) {
    const auto src = a.row(r);
    for (std::size_t c = 0; c < a.cols(); ++c) out[c] += src[c];
  }
}

void check_finite(const Tensor2& t, std::string_view where) {
  if (!t.all_finite()) throw NumericFault("non-finite value in " + std::string(where));
}

void check_finite(double v, std::string_view where) {
  if (!std::isfinite(v)) throw NumericFault("non-finite value in " + std::string(where));
}

void require_shape(const Tensor2& t, std::size_t rows, std::size_t cols, std::string_view what) {
  if (t.rows() != rows || t.cols() != cols) {
    throw ShapeError(std::string(what) + ": expected " + std::to_string(rows) + "x" +
                     std::to_string(cols) + ", got " + shape_str(t));
  }
}

}  // namespace asgn
