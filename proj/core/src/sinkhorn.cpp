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

#include <algorithm>
#include <cmath>
#include <limits>

#include "asgn/errors.hpp"
#include "asgn/ssl.hpp"

namespace asgn {

namespace {

constexpr double kAbsorb = 69.0;
// Kernel sums below this are recomputed in log space.
constexpr double kTiny = 1e-200;

}  // namespace

TransportPlan sinkhorn_solve(const Tensor2& log_q, std::span<const double> row_marginal,
                             std::span<const double> col_marginal, const SinkhornOptions& opts) {
  const std::size_t n = log_q.rows();
  const std::size_t m = log_q.cols();
  if (row_marginal.size() != n || col_marginal.size() != m) {
    throw ShapeError("sinkhorn: marginal lengths do not match the " + std::to_string(n) + "x" + std::to_string(m) +
                     " prediction matrix");
  }
  if (!(opts.lambda > 0.0)) throw ConfigError("sinkhorn: lambda must be positive");
  if (n == 0 || m == 0) throw ShapeError("sinkhorn: empty prediction matrix");
  check_finite(log_q, "sinkhorn log-predictions");

  Tensor2 log_k(n, m);
  for (std::size_t i = 0; i < log_q.size(); ++i) log_k[i] = opts.lambda * log_q[i];

  // Scaling iterations on a kernel that is re-centred in log space whenever
  // a scaling leaves [e^-69, e^69]. The log potentials f, g hold what has
  // been absorbed so far; u, v hold the rest.
  std::vector<double> f(n), g(m, 0.0), u(n, 1.0), v(m, 1.0), kv(n), ktu(m);
  for (std::size_t i = 0; i < n; ++i) {
    const double* k = log_k.data() + i * m;
    f[i] = -*std::max_element(k, k + m);
  }
  Tensor2 kern(n, m);
  const auto rebuild = [&] {
    for (std::size_t i = 0; i < n; ++i) {
      if (u[i] != 1.0) f[i] += std::log(u[i]);
      u[i] = 1.0;
    }
    for (std::size_t j = 0; j < m; ++j) {
      if (v[j] != 1.0) g[j] += std::log(v[j]);
      v[j] = 1.0;
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double* k = log_k.data() + i * m;
      double* out = kern.data() + i * m;
      for (std::size_t j = 0; j < m; ++j) {
        const double x = k[j] + f[i] + g[j];
        // Entries this small cannot move a marginal by the tolerance; dropping
        // them keeps subnormals out of the inner loops.
        out[j] = x < -700.0 ? 0.0 : std::exp(x);
      }
    }
  };
  // A row or column whose kernel mass underflowed is re-solved exactly in
  // log space.
  const auto log_row = [&](std::size_t i) {
    const double* k = log_k.data() + i * m;
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < m; ++j) mx = std::max(mx, k[j] + g[j] + std::log(v[j]));
    double s = 0.0;
    for (std::size_t j = 0; j < m; ++j) s += std::exp(k[j] + g[j] + std::log(v[j]) - mx);
    return mx + std::log(s);
  };
  const auto log_col = [&](std::size_t j) {
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) mx = std::max(mx, log_k(i, j) + f[i] + std::log(u[i]));
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::exp(log_k(i, j) + f[i] + std::log(u[i]) - mx);
    return mx + std::log(s);
  };
  rebuild();

  TransportPlan out;
  for (std::size_t sweep = 0; sweep < opts.max_sweeps; ++sweep) {
    // Row sums of the current plan are u_i (K v)_i, so the residual check
    // costs nothing extra.
    double row_res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double* k = kern.data() + i * m;
      double s = 0.0;
      for (std::size_t j = 0; j < m; ++j) s += k[j] * v[j];
      kv[i] = s;
      row_res = std::max(row_res, std::abs(u[i] * s - row_marginal[i]));
    }
    out.sweeps = sweep;
    // Columns are exact after every column pass, so rows decide.
    if (sweep > 0 && row_res < opts.tolerance) break;
    // A scaling whose log leaves [-kAbsorb, kAbsorb] goes straight into the
    // potentials and the kernel is rebuilt before it is used again.
    bool absorb = false;
    for (std::size_t i = 0; i < n; ++i) {
      const double lu = kv[i] > kTiny ? std::log(row_marginal[i] / kv[i])
                                      : std::log(row_marginal[i]) - log_row(i) - f[i];
      if (std::abs(lu) > kAbsorb) {
        f[i] += lu;
        u[i] = 1.0;
        absorb = true;
      } else {
        u[i] = std::exp(lu);
      }
    }
    if (absorb) rebuild();
    out.sweeps = sweep + 1;
    std::fill(ktu.begin(), ktu.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double* k = kern.data() + i * m;
      const double ui = u[i];
      for (std::size_t j = 0; j < m; ++j) ktu[j] += k[j] * ui;
    }
    absorb = false;
    for (std::size_t j = 0; j < m; ++j) {
      const double lv = ktu[j] > kTiny ? std::log(col_marginal[j] / ktu[j])
                                       : std::log(col_marginal[j]) - log_col(j) - g[j];
      if (std::abs(lv) > kAbsorb) {
        g[j] += lv;
        v[j] = 1.0;
        absorb = true;
      } else {
        v[j] = std::exp(lv);
      }
    }
    if (absorb) rebuild();
  }
  for (std::size_t i = 0; i < n; ++i) f[i] += std::log(u[i]);
  for (std::size_t j = 0; j < m; ++j) g[j] += std::log(v[j]);

  out.plan = Tensor2(n, m);
  std::vector<double> rows(n, 0.0), cols(m, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double p = std::exp(log_k(i, j) + f[i] + g[j]);
      out.plan(i, j) = p;
      rows[i] += p;
      cols[j] += p;
    }
  }
  out.row_residual = 0.0;
  out.col_residual = 0.0;
  for (std::size_t i = 0; i < n; ++i) out.row_residual = std::max(out.row_residual, std::abs(rows[i] - row_marginal[i]));
  for (std::size_t j = 0; j < m; ++j) out.col_residual = std::max(out.col_residual, std::abs(cols[j] - col_marginal[j]));
  out.converged = out.row_residual < opts.tolerance && out.col_residual < opts.tolerance;
  out.row_marginal.assign(row_marginal.begin(), row_marginal.end());
  out.col_marginal.assign(col_marginal.begin(), col_marginal.end());
  check_finite(out.plan, "sinkhorn plan");
  return out;
}

TransportPlan sinkhorn_plan(const Tensor2& log_q, std::span<const double> row_marginal,
                            std::span<const double> col_marginal, const SinkhornOptions& opts) {
  TransportPlan p = sinkhorn_solve(log_q, row_marginal, col_marginal, opts);
  if (!p.converged) {
    const double res = std::max(p.row_residual, p.col_residual);
    throw ConvergenceError("sinkhorn did not reach marginal tolerance " + std::to_string(opts.tolerance) +
                               " within " + std::to_string(opts.max_sweeps) + " sweeps (residual " +
                               std::to_string(res) + ")",
                           res);
  }
  return p;
}

TransportPlan sinkhorn_plan_uniform(const Tensor2& log_q, const SinkhornOptions& opts) {
  const std::vector<double> r(log_q.rows(), 1.0 / static_cast<double>(log_q.rows()));
  const std::vector<double> c(log_q.cols(), 1.0 / static_cast<double>(log_q.cols()));
  return sinkhorn_plan(log_q, r, c, opts);
}

std::vector<int> hardmax_labels(const TransportPlan& plan) {
  std::vector<int> labels(plan.plan.rows());
  for (std::size_t i = 0; i < plan.plan.rows(); ++i) {
    const auto row = plan.plan.row(i);
    std::size_t best = 0;
    for (std::size_t j = 1; j < row.size(); ++j) {
      if (row[j] > row[best]) best = j;
    }
    labels[i] = static_cast<int>(best);
  }
  return labels;
}

double transport_cost(const Tensor2& plan, const Tensor2& log_q) {
  if (!plan.same_shape(log_q)) throw ShapeError("transport_cost: shape mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < plan.size(); ++i) s -= plan[i] * log_q[i];
  return s;
}

void ClusterHead::init_parameters(ParameterSet& params, RngStream& rng) const {
  glorot_uniform(params.add("cluster.w", dim, clusters).value, rng);
  params.add("cluster.b", 1, clusters);
}

Tensor2 ClusterHead::logits(const ParameterSet& params, const Tensor2& graph_embeddings) const {
  return linear(graph_embeddings, params.value("cluster.w"), params.value("cluster.b"));
}

LossGrad clustering_loss(const Tensor2& logits, std::span<const int> labels) {
  if (labels.size() != logits.rows()) {
    throw ShapeError("clustering_loss: " + std::to_string(labels.size()) + " labels for " +
                     std::to_string(logits.rows()) + " rows");
  }
  return softmax_cross_entropy(logits, labels);
}

}  // namespace asgn
