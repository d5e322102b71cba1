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

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "asgn/errors.hpp"
#include "asgn/gradcheck.hpp"
#include "asgn/ops.hpp"
#include "asgn/params.hpp"

namespace asgn {
namespace {

Tensor2 random_tensor(std::size_t r, std::size_t c, RngStream& rng, double scale = 1.0) {
  Tensor2 t(r, c);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = scale * rng.normal();
  return t;
}

double weighted_sum(const Tensor2& y, const Tensor2& w) {
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) s += y[i] * w[i];
  return s;
}

TEST(Tensor, MatmulVariants) {
  const Tensor2 a = Tensor2::from_rows({{1, 2, 3}, {4, 5, 6}});
  const Tensor2 b = Tensor2::from_rows({{1, 0}, {0, 1}, {1, 1}});
  EXPECT_EQ(matmul(a, b), Tensor2::from_rows({{4, 5}, {10, 11}}));
  const Tensor2 bt = Tensor2::from_rows({{1, 0, 1}, {0, 1, 1}});
  EXPECT_EQ(matmul_nt(a, bt), Tensor2::from_rows({{4, 5}, {10, 11}}));
  Tensor2 out(3, 3, 1.0);
  matmul_tn_acc(a, a, out);
  EXPECT_EQ(out, Tensor2::from_rows({{18, 23, 28}, {23, 30, 37}, {28, 37, 46}}));
  Tensor2 cs(1, 3);
  colsum_acc(a, cs);
  EXPECT_EQ(cs, Tensor2::from_rows({{5, 7, 9}}));
  EXPECT_THROW(matmul(a, a), ShapeError);
  EXPECT_THROW(Tensor2(2, 2, std::vector<double>{1, 2, 3}), ShapeError);
}

TEST(Tensor, FiniteChecks) {
  Tensor2 t(2, 2);
  EXPECT_NO_THROW(check_finite(t, "t"));
  t(1, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(check_finite(t, "t"), NumericFault);
  EXPECT_THROW(check_finite(std::numeric_limits<double>::infinity(), "v"), NumericFault);
}

TEST(Linear, IdentityInputReturnsWeights) {
  const Tensor2 x = Tensor2::from_rows({{1, 0}, {0, 1}});
  const Tensor2 w = Tensor2::from_rows({{1, 2}, {3, 4}});
  EXPECT_EQ(linear(x, w, Tensor2(1, 2)), w);
}

TEST(Linear, BiasGradientIsColumnSum) {
  RngStream rng(1);
  const Tensor2 x = random_tensor(3, 4, rng);
  const Tensor2 w = random_tensor(4, 2, rng);
  const Tensor2 dy(3, 2, 1.0);
  Tensor2 dw(4, 2), db(1, 2), dx;
  linear_backward(x, w, dy, &dx, dw, db);
  EXPECT_EQ(db, Tensor2::from_rows({{3, 3}}));
  // Accumulation: a second call doubles the parameter gradients.
  linear_backward(x, w, dy, nullptr, dw, db);
  EXPECT_EQ(db, Tensor2::from_rows({{6, 6}}));
}

TEST(Linear, GradientMatchesFiniteDifferences) {
  RngStream rng(2);
  ParameterSet p;
  p.add("x", 3, 4).value = random_tensor(3, 4, rng);
  p.add("w", 4, 2).value = random_tensor(4, 2, rng);
  p.add("b", 1, 2).value = random_tensor(1, 2, rng);
  const Tensor2 c = random_tensor(3, 2, rng);
  const LossFunction f = [&](ParameterSet& ps, bool with_grad) {
    const Tensor2 y = linear(ps.value("x"), ps.value("w"), ps.value("b"));
    if (with_grad) {
      Tensor2 dx;
      linear_backward(ps.value("x"), ps.value("w"), c, &dx, ps.grad("w"), ps.grad("b"));
      ps.grad("x") += dx;
    }
    return weighted_sum(y, c);
  };
  RngStream probe(3);
  EXPECT_LT(grad_check(p, f, 16, probe).max_rel_error, 1e-6);
}

TEST(Linear, ShapeMismatchThrows) {
  EXPECT_THROW(linear(Tensor2(2, 3), Tensor2(2, 2), Tensor2(1, 2)), ShapeError);
}

TEST(ShiftedSoftplus, FixedPointsAndAsymptote) {
  EXPECT_DOUBLE_EQ(shifted_softplus(0.0), 0.0);
  EXPECT_NEAR(shifted_softplus(50.0), 50.0 - std::numbers::ln2, 1e-12);
  EXPECT_DOUBLE_EQ(shifted_softplus(1e6), 1e6 - std::numbers::ln2);
  EXPECT_NEAR(shifted_softplus(-1e6), -std::numbers::ln2, 1e-12);
  EXPECT_DOUBLE_EQ(shifted_softplus_grad(0.0), 0.5);
  EXPECT_TRUE(std::isfinite(shifted_softplus_grad(-1e6)));
  EXPECT_TRUE(std::isfinite(shifted_softplus_grad(1e6)));
}

TEST(ShiftedSoftplus, GradientMatchesFiniteDifferences) {
  RngStream rng(4);
  const double h = 1e-5;
  for (int i = 0; i < 20; ++i) {
    const double x = 4.0 * rng.normal();
    const double num = (shifted_softplus(x + h) - shifted_softplus(x - h)) / (2 * h);
    const double ana = shifted_softplus_grad(x);
    EXPECT_LT(std::abs(num - ana) / std::max(1e-8, std::abs(num) + std::abs(ana)), 1e-6) << x;
  }
}

TEST(Activation, BackwardIsElementwiseDerivative) {
  const Tensor2 x = Tensor2::from_rows({{-1.0, 0.5, 2.0}});
  const Tensor2 dy = Tensor2::from_rows({{1.0, 2.0, 3.0}});
  EXPECT_EQ(activate_backward(x, dy, Activation::Relu), Tensor2::from_rows({{0.0, 2.0, 3.0}}));
  const Tensor2 g = activate_backward(x, dy, Activation::ShiftedSoftplus);
  for (std::size_t k = 0; k < 3; ++k) EXPECT_DOUBLE_EQ(g[k], dy[k] * shifted_softplus_grad(x[k]));
  EXPECT_EQ(activate(x, Activation::Relu), Tensor2::from_rows({{0.0, 0.5, 2.0}}));
  EXPECT_EQ(activation_from_string("ssp"), Activation::ShiftedSoftplus);
  EXPECT_EQ(activation_from_string("relu"), Activation::Relu);
  EXPECT_THROW(activation_from_string("tanh"), ConfigError);
}

TEST(SoftmaxCrossEntropy, UniformLogitsGiveLogK) {
  const Tensor2 logits(3, 7, 0.25);
  const std::vector<int> t{0, 3, 6};
  EXPECT_NEAR(softmax_cross_entropy(logits, t).loss, std::log(7.0), 1e-12);
}

TEST(SoftmaxCrossEntropy, PeakedLogitsApproachZero) {
  Tensor2 logits(2, 4, 0.0);
  logits(0, 1) = 60.0;
  logits(1, 3) = 60.0;
  const std::vector<int> t{1, 3};
  EXPECT_LT(softmax_cross_entropy(logits, t).loss, 1e-20);
}

TEST(SoftmaxCrossEntropy, GradientMatchesFiniteDifferences) {
  RngStream rng(5);
  ParameterSet p;
  p.add("z", 4, 5).value = random_tensor(4, 5, rng, 2.0);
  const std::vector<int> t{0, 4, 2, 2};
  const LossFunction f = [&](ParameterSet& ps, bool with_grad) {
    const LossGrad lg = softmax_cross_entropy(ps.value("z"), t);
    if (with_grad) ps.grad("z") += lg.grad;
    return lg.loss;
  };
  RngStream probe(6);
  EXPECT_LT(grad_check(p, f, 20, probe).max_rel_error, 1e-6);
}

TEST(SoftmaxCrossEntropy, RejectsBadTargets) {
  const Tensor2 logits(2, 3);
  const std::vector<int> short_t{0};
  const std::vector<int> bad_t{0, 3};
  EXPECT_THROW(softmax_cross_entropy(logits, short_t), ShapeError);
  EXPECT_THROW(softmax_cross_entropy(logits, bad_t), ShapeError);
}

TEST(SoftmaxCrossEntropy, LargeLogitsStayFinite) {
  const Tensor2 logits = Tensor2::from_rows({{1e6, -1e6, 0.0}});
  const std::vector<int> t{1};
  const LossGrad lg = softmax_cross_entropy(logits, t);
  EXPECT_DOUBLE_EQ(lg.loss, 2e6);
  EXPECT_TRUE(lg.grad.all_finite());
}

TEST(Mse, ZeroAndUnitResidual) {
  const Tensor2 p = Tensor2::from_rows({{1.0}, {2.0}, {-3.0}});
  EXPECT_DOUBLE_EQ(mse(p, p).loss, 0.0);
  const Tensor2 t = Tensor2::from_rows({{0.0}, {1.0}, {-4.0}});
  EXPECT_DOUBLE_EQ(mse(p, t).loss, 1.0);
}

TEST(Mse, GradientIsTwiceResidualOverRows) {
  RngStream rng(7);
  const Tensor2 p = random_tensor(5, 3, rng);
  const Tensor2 t = random_tensor(5, 3, rng);
  const LossGrad lg = mse(p, t);
  for (std::size_t i = 0; i < p.size(); ++i) EXPECT_DOUBLE_EQ(lg.grad[i], 2.0 * (p[i] - t[i]) / 5.0);

  ParameterSet ps;
  ps.add("p", 5, 3).value = p;
  const LossFunction f = [&](ParameterSet& s, bool with_grad) {
    const LossGrad g = mse(s.value("p"), t);
    if (with_grad) s.grad("p") += g.grad;
    return g.loss;
  };
  RngStream probe(8);
  EXPECT_LT(grad_check(ps, f, 15, probe).max_rel_error, 1e-6);
}

TEST(Adam, ZeroGradientLeavesParametersUnchanged) {
  RngStream rng(9);
  ParameterSet p;
  p.add("w", 3, 3).value = random_tensor(3, 3, rng);
  const Tensor2 before = p.value("w");
  adam_step(p, AdamConfig{});
  EXPECT_EQ(p.value("w"), before);
  EXPECT_EQ(p.step(), 1u);
}

TEST(Adam, FirstStepHasMagnitudeLr) {
  for (double g : {1e-3, 1.0, 1e3}) {
    ParameterSet p;
    p.add("w", 1, 1).value[0] = 0.5;
    p.grad("w")[0] = g;
    AdamConfig cfg;
    cfg.lr = 0.01;
    adam_step(p, cfg);
    EXPECT_NEAR(p.value("w")[0], 0.5 - 0.01, 1e-7) << g;
    EXPECT_EQ(p.grad("w")[0], 0.0);
  }
}

TEST(Adam, IdenticalSetsStayBitIdentical) {
  RngStream a(10), b(10);
  ParameterSet pa, pb;
  pa.add("w", 4, 2).value = random_tensor(4, 2, a);
  pb.add("w", 4, 2).value = random_tensor(4, 2, b);
  RngStream grads(11);
  for (int s = 0; s < 25; ++s) {
    const Tensor2 g = random_tensor(4, 2, grads);
    pa.grad("w") = g;
    pb.grad("w") = g;
    adam_step(pa, AdamConfig{});
    adam_step(pb, AdamConfig{});
  }
  EXPECT_TRUE(pa.values_equal(pb));
  EXPECT_EQ(pa.hash(), pb.hash());
}

TEST(ParameterSet, SubsetCopiesValuesOnly) {
  RngStream rng(12);
  ParameterSet p;
  p.add("keep.w", 2, 2).value = random_tensor(2, 2, rng);
  p.add("drop.w", 2, 2);
  p.grad("keep.w").fill(1.0);
  const auto s = p.subset([](std::string_view n) { return n.starts_with("keep"); });
  EXPECT_EQ(s.size(), 1u);
  EXPECT_EQ(s.value("keep.w"), p.value("keep.w"));
  EXPECT_EQ(s.at("keep.w").grad, Tensor2(2, 2));
  EXPECT_THROW(p.add("keep.w", 1, 1), ArchitectureError);
  EXPECT_THROW(p.at("missing"), ArchitectureError);
  EXPECT_EQ(p.scalar_count(), 8u);
}

TEST(Glorot, StaysWithinBound) {
  RngStream rng(13);
  Tensor2 w(30, 10);
  glorot_uniform(w, rng);
  const double a = std::sqrt(6.0 / 40.0);
  double mx = 0.0;
  for (double v : w.values()) {
    EXPECT_LE(std::abs(v), a);
    mx = std::max(mx, std::abs(v));
  }
  EXPECT_GT(mx, 0.8 * a);
}

TEST(GradCheck, QuadraticIsExactToRoundoff) {
  RngStream rng(14);
  ParameterSet p;
  p.add("w", 3, 4).value = random_tensor(3, 4, rng);
  const LossFunction f = [](ParameterSet& ps, bool with_grad) {
    double s = 0.0;
    const Tensor2& w = ps.value("w");
    for (double v : w.values()) s += v * v;
    if (with_grad) {
      for (std::size_t i = 0; i < w.size(); ++i) ps.grad("w")[i] += 2.0 * w[i];
    }
    return s;
  };
  RngStream probe(15);
  EXPECT_LT(grad_check(p, f, 12, probe).max_rel_error, 1e-9);
}

TEST(GradCheck, DetectsCorruptedBackward) {
  RngStream rng(16);
  ParameterSet p;
  p.add("z", 4, 5).value = random_tensor(4, 5, rng);
  const std::vector<int> t{1, 2, 3, 4};
  const LossFunction f = [&](ParameterSet& ps, bool with_grad) {
    const LossGrad lg = softmax_cross_entropy(ps.value("z"), t);
    if (with_grad) {
      Tensor2 g = lg.grad;
      g *= 1.1;  // wrong by 10%
      ps.grad("z") += g;
    }
    return lg.loss;
  };
  RngStream probe(17);
  const auto r = grad_check(p, f, 20, probe);
  EXPECT_GT(r.max_rel_error, 1e-2);
  EXPECT_EQ(r.worst_parameter, "z");
  EXPECT_EQ(r.probes, 20u);
}

}  // namespace
}  // namespace asgn
