// Licensed under the Apache License, Version 2.0 (the "License"); you
// may not use this file except in compliance with the License.  You
// may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or
// implied.  See the License for the specific language governing
// permissions and limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "atlbp/numgrad/adam.hpp"
#include "atlbp/numgrad/finite_difference.hpp"
#include "atlbp/numgrad/ops.hpp"
#include "atlbp/numgrad/tape.hpp"
#include "test_util.hpp"

namespace atlbp::numgrad {
namespace {

TEST(Ops, AffineMatchesHandComputation) {
  const Matrix w(2, 3, {1, 2, 3, -1, 0, 4});
  const Vector b{0.5, -1.0};
  const Vector x{1.0, -2.0, 0.25};
  const Vector y = apply_affine(w, b, x);
  ASSERT_EQ(y.size(), 2u);
  EXPECT_DOUBLE_EQ(y[0], 1 - 4 + 0.75 + 0.5);
  EXPECT_DOUBLE_EQ(y[1], -1 + 0 + 1 - 1.0);

  const Vector no_bias = apply_affine(w, {}, x);
  EXPECT_DOUBLE_EQ(no_bias[0], -2.25);
}

TEST(Ops, AffineRejectsShapeMismatch) {
  const Matrix w(2, 3);
  EXPECT_ATLBP_ERROR(apply_affine(w, {}, Vector{1.0, 2.0}), ErrorKind::dimension);
  EXPECT_ATLBP_ERROR(apply_affine(w, Vector{1.0}, Vector{1.0, 2.0, 3.0}), ErrorKind::dimension);
}

TEST(Ops, DotHandlesLengthsNotMultipleOfFour) {
  for (std::size_t n = 0; n < 11; ++n) {
    Vector a(n), b(n);
    double expected = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = 0.5 + static_cast<double>(i);
      b[i] = 1.0 - 0.25 * static_cast<double>(i);
      expected += a[i] * b[i];
    }
    EXPECT_NEAR(dot(a, b), expected, 1e-12) << "n=" << n;
  }
}

TEST(Ops, SoftmaxUniformAndCrossEntropyLn3) {
  const Vector p = softmax(Vector{0.0, 0.0, 0.0});
  for (double v : p) EXPECT_NEAR(v, 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(cross_entropy(p, 1), std::log(3.0), 1e-12);
}

TEST(Ops, SoftmaxIsShiftInvariantAndStable) {
  const Vector a = softmax(Vector{1.0, 2.0, 3.0});
  const Vector b = softmax(Vector{1001.0, 1002.0, 1003.0});
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(a[i], b[i], 1e-15);
  const Vector big = softmax(Vector{1000.0, 0.0, -1000.0});
  EXPECT_TRUE(all_finite(big));
  EXPECT_NEAR(big[0], 1.0, 1e-15);
  EXPECT_NEAR(std::accumulate(big.begin(), big.end(), 0.0), 1.0, 1e-15);
}

TEST(Ops, SoftmaxRejectsNonFiniteLogits) {
  EXPECT_ATLBP_ERROR(softmax(Vector{0.0, std::nan("")}), ErrorKind::numeric);
}

TEST(Ops, CrossEntropyOfPointTwo) {
  const Vector p{0.2, 0.3, 0.5};
  EXPECT_NEAR(cross_entropy(p, 0), 1.6094379124341003, 1e-12);
  EXPECT_ATLBP_ERROR(cross_entropy(p, 3), ErrorKind::label);
}

TEST(Ops, ArgmaxBreaksTiesTowardLowestIndex) {
  EXPECT_EQ(argmax(Vector{0.1, 0.4, 0.4, 0.1}), 1u);
  EXPECT_EQ(argmax(Vector{2.0}), 0u);
}

TEST(Ops, SigmoidSaturatesWithoutOverflow) {
  EXPECT_DOUBLE_EQ(sigmoid(0.0), 0.5);
  EXPECT_NEAR(sigmoid(800.0), 1.0, 1e-300);
  EXPECT_GE(sigmoid(-800.0), 0.0);
  EXPECT_NEAR(sigmoid(2.0) + sigmoid(-2.0), 1.0, 1e-15);
}

TEST(Tape, SoftmaxCrossEntropyAdjointIsProbabilitiesMinusOneHot) {
  ParameterSet empty;
  GradTape tape(empty);
  const Vector z{0.3, -1.2, 2.0, 0.0};
  const NodeId logits = tape.variable(z);
  const NodeId loss = tape.softmax_cross_entropy(logits, 2);
  tape.backward(loss);
  const Vector g = tape.adjoint(logits);
  const Vector p = softmax(z);
  for (std::size_t i = 0; i < z.size(); ++i) {
    EXPECT_NEAR(g[i], p[i] - (i == 2 ? 1.0 : 0.0), 1e-15);
  }
  // Central differences of -log softmax(z)[2].
  for (std::size_t i = 0; i < z.size(); ++i) {
    Vector plus = z, minus = z;
    plus[i] += 1e-6;
    minus[i] -= 1e-6;
    const double fd = (-std::log(softmax(plus)[2]) + std::log(softmax(minus)[2])) / 2e-6;
    EXPECT_NEAR(g[i], fd, 1e-8);
  }
}

TEST(Tape, UnusedParameterGetsExactZeroGradient) {
  ParameterSet params;
  const ParamId used = params.add("used", Matrix(2, 2, {1, 2, 3, 4}));
  const ParamId dead = params.add("dead", Matrix(3, 1, {5, 6, 7}));
  GradTape tape(params);
  const NodeId x = tape.constant(Vector{1.0, -1.0});
  const NodeId loss = tape.softmax_cross_entropy(tape.affine(used, std::nullopt, x), 0);
  const Gradients g = tape.backward(loss);
  for (double v : g[dead].values()) EXPECT_EQ(v, 0.0);
  EXPECT_GT(global_norm(g), 0.0);
}

TEST(Tape, BackwardRequiresScalarRoot) {
  ParameterSet empty;
  GradTape tape(empty);
  EXPECT_ATLBP_ERROR(tape.backward(NodeId{0}), ErrorKind::usage);
  const NodeId v = tape.variable(Vector{1.0, 2.0});
  EXPECT_ATLBP_ERROR(tape.backward(v), ErrorKind::usage);
}

// Every primitive in one graph, checked against central differences.
double composite(const ParameterSet& p, const Vector& x, std::size_t label, GradTape* keep,
                 Gradients* grads) {
  GradTape local(p);
  GradTape& tape = keep ? *keep : local;
  const NodeId in = tape.constant(x);
  const NodeId a = tape.affine(ParamId{0}, ParamId{1}, in);  // 6
  const NodeId t = tape.tanh(a);
  const NodeId s = tape.sigmoid(tape.scale(a, -0.7));
  const NodeId m = tape.mul(t, s);
  const NodeId lo = tape.slice(m, 0, 3);
  const NodeId hi = tape.slice(m, 3, 3);
  const std::array<NodeId, 2> pair{lo, hi};
  const NodeId avg = tape.mean(pair);
  const NodeId sum = tape.add(avg, tape.tanh(hi));
  const std::array<NodeId, 2> parts{sum, lo};
  const NodeId cat = tape.concat(parts);
  const NodeId logits = tape.affine(ParamId{2}, ParamId{3}, cat);
  const NodeId loss = tape.softmax_cross_entropy(logits, label);
  if (grads) *grads = tape.backward(loss);
  return tape.value(loss)[0];
}

TEST(Tape, CompositeGraphMatchesFiniteDifferencesOver24Seeds) {
  for (std::uint64_t seed = 0; seed < 24; ++seed) {
    std::mt19937_64 rng(seed);
    auto fill = [&rng](std::size_t r, std::size_t c) {
      return Matrix(r, c, atlbp::testing::random_vector(r * c, rng, 0.8).values());
    };
    ParameterSet p;
    p.add("w1", fill(6, 4));
    p.add("b1", fill(6, 1));
    p.add("w2", fill(3, 6));
    p.add("b2", fill(3, 1));
    const Vector x = atlbp::testing::random_vector(4, rng);
    const std::size_t label = seed % 3;

    Gradients analytic;
    composite(p, x, label, nullptr, &analytic);
    const Gradients numeric = finite_difference_gradient(
        [&](const ParameterSet& q) { return composite(q, x, label, nullptr, nullptr); }, p, 1e-6);
    EXPECT_LT(max_relative_error(analytic, numeric), 1e-6) << "seed " << seed;
  }
}

TEST(Tape, RepeatedBackwardIsBitIdentical) {
  std::mt19937_64 rng(3);
  ParameterSet p;
  p.add("w1", Matrix(6, 4, atlbp::testing::random_vector(24, rng).values()));
  p.add("b1", Matrix(6, 1, atlbp::testing::random_vector(6, rng).values()));
  p.add("w2", Matrix(3, 6, atlbp::testing::random_vector(18, rng).values()));
  p.add("b2", Matrix(3, 1, atlbp::testing::random_vector(3, rng).values()));
  const Vector x{0.1, 0.2, -0.3, 0.4};
  Gradients a, b;
  composite(p, x, 1, nullptr, &a);
  composite(p, x, 1, nullptr, &b);
  EXPECT_EQ(a, b);
}

TEST(FiniteDifference, SquareAtThreeIsSix) {
  ParameterSet p;
  p.add("theta", Matrix(1, 1, {3.0}));
  const Gradients g = finite_difference_gradient(
      [](const ParameterSet& q) { return q.at(0)(0, 0) * q.at(0)(0, 0); }, p, 1e-6);
  EXPECT_NEAR(g.at(0)(0, 0), 6.0, 1e-8);
}

TEST(FiniteDifference, RelativeErrorUsesFloorForTinyValues) {
  EXPECT_DOUBLE_EQ(relative_error(1.0, 1.0), 0.0);
  EXPECT_NEAR(relative_error(2.0, 1.0), 0.5, 1e-15);
  EXPECT_NEAR(relative_error(1e-9, 0.0), 1e-5, 1e-18);
  EXPECT_NEAR(relative_error(1e-9, 0.0, 1e-9), 1.0, 1e-15);
}

TEST(Adam, FirstStepMovesByLearningRateAgainstGradientSign) {
  ParameterSet p;
  p.add("w", Matrix(1, 3, {1.0, -2.0, 0.5}));
  ParameterSet g = p.zeros_like();
  g.at(0) = Matrix(1, 3, {0.3, -4.0, 1e-3});
  AdamState adam(p, AdamOptions{});
  adam.step(p, g);
  // m̂ = g, v̂ = g², so Δ = -lr·g/(|g| + ε).
  const double lr = 3e-5;
  EXPECT_NEAR(p.at(0)(0, 0), 1.0 - lr * 0.3 / (0.3 + 1e-8), 1e-15);
  EXPECT_NEAR(p.at(0)(0, 1), -2.0 + lr * 4.0 / (4.0 + 1e-8), 1e-15);
  EXPECT_NEAR(p.at(0)(0, 2), 0.5 - lr * 1e-3 / (1e-3 + 1e-8), 1e-15);
  EXPECT_EQ(adam.step_count(), 1u);
}

TEST(Adam, ZeroGradientLeavesParametersUnchanged) {
  ParameterSet p;
  p.add("w", Matrix(2, 2, {1, 2, 3, 4}));
  const ParameterSet before = p;
  AdamState adam(p, AdamOptions{});
  for (int i = 0; i < 5; ++i) adam.step(p, p.zeros_like());
  EXPECT_EQ(p, before);
}

TEST(Adam, MinimizesSquare) {
  ParameterSet p;
  p.add("theta", Matrix(1, 1, {3.0}));
  AdamState adam(p, AdamOptions{0.1, 0.9, 0.999, 1e-8});
  for (int i = 0; i < 100; ++i) {
    ParameterSet g = p.zeros_like();
    g.at(0)(0, 0) = 2.0 * p.at(0)(0, 0);
    adam.step(p, g);
  }
  EXPECT_LT(std::abs(p.at(0)(0, 0)), 0.5);
}

TEST(Adam, RejectsMismatchedGradients) {
  ParameterSet p;
  p.add("w", Matrix(2, 2));
  ParameterSet other;
  other.add("w", Matrix(2, 3));
  AdamState adam(p, AdamOptions{});
  EXPECT_ATLBP_ERROR(adam.step(p, other), ErrorKind::dimension);
}

TEST(Parameters, ClipGlobalNormScalesAllTensors) {
  ParameterSet g;
  g.add("a", Matrix(1, 2, {3.0, 0.0}));
  g.add("b", Matrix(1, 1, {4.0}));
  EXPECT_DOUBLE_EQ(global_norm(g), 5.0);
  clip_global_norm(g, 1.0);
  EXPECT_NEAR(global_norm(g), 1.0, 1e-15);
  EXPECT_NEAR(g.at(0)(0, 0), 0.6, 1e-15);
  EXPECT_NEAR(g.at(1)(0, 0), 0.8, 1e-15);
}

}  // namespace
}  // namespace atlbp::numgrad
