// Copyright 2026 The AIVA Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <string>

#include <gtest/gtest.h>

#include "aiva/numerics/grad_check.hpp"
#include "aiva/numerics/graph.hpp"
#include "aiva/numerics/ops.hpp"

namespace aiva::num {
namespace {

Tensor<double> random_tensor(Shape shape, std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, scale);
  Tensor<double> t(std::move(shape));
  for (auto& v : t.values()) v = dist(rng);
  return t;
}

// Reduces an op's output to a scalar through fixed random weights so every
// output entry carries a distinct gradient.
Var<double> weighted(Graph<double>& g, Var<double> y, std::uint64_t seed = 99) {
  return sum(mul(y, g.constant(random_tensor(y.shape(), seed))));
}

void expect_grad_ok(const ScalarFn& f, const Tensor<double>& x, double tol = 1e-6) {
  const GradCheckReport r = grad_check(f, x);
  EXPECT_LT(r.max_rel_err, tol) << "worst index " << r.worst_index;
  EXPECT_EQ(r.checked, x.size());
}

TEST(OpsGrad, MatMulBothSides) {
  const auto b = random_tensor({4, 3}, 2);
  expect_grad_ok([&](Graph<double>& g, Var<double> x) { return weighted(g, matmul(x, g.constant(b))); },
                 random_tensor({2, 4}, 1));
  const auto a = random_tensor({2, 4}, 3);
  expect_grad_ok([&](Graph<double>& g, Var<double> x) { return weighted(g, matmul(g.constant(a), x)); },
                 random_tensor({4, 3}, 4));
}

TEST(OpsGrad, Elementwise) {
  const auto other = random_tensor({3, 4}, 5);
  const auto x = random_tensor({3, 4}, 6);
  expect_grad_ok([&](Graph<double>& g, Var<double> v) { return weighted(g, add(v, g.constant(other))); }, x);
  expect_grad_ok([&](Graph<double>& g, Var<double> v) { return weighted(g, sub(g.constant(other), v)); }, x);
  expect_grad_ok([&](Graph<double>& g, Var<double> v) { return weighted(g, mul(v, v)); }, x);
  expect_grad_ok([&](Graph<double>& g, Var<double> v) { return weighted(g, scale(v, -2.5)); }, x);
  expect_grad_ok([&](Graph<double>& g, Var<double> v) { return weighted(g, add_scalar(v, 0.75)); }, x);
}

TEST(OpsGrad, AddBiasBothInputs) {
  const auto x = random_tensor({3, 4}, 7);
  const auto b = random_tensor({4}, 8);
  expect_grad_ok([&](Graph<double>& g, Var<double> v) { return weighted(g, add_bias(v, g.constant(b))); }, x);
  expect_grad_ok([&](Graph<double>& g, Var<double> v) { return weighted(g, add_bias(g.constant(x), v)); }, b);
}

TEST(OpsGrad, TransposeConcatSlice) {
  const auto x = random_tensor({3, 5}, 9);
  const auto y = random_tensor({2, 5}, 10);
  expect_grad_ok([&](Graph<double>& g, Var<double> v) { return weighted(g, transpose(v)); }, x);
  expect_grad_ok(
      [&](Graph<double>& g, Var<double> v) {
        return weighted(g, concat(std::vector<Var<double>>{g.constant(y), v, v}, 0));
      },
      x);
  expect_grad_ok(
      [&](Graph<double>& g, Var<double> v) {
        return weighted(g, concat(std::vector<Var<double>>{v, g.constant(x)}, 1));
      },
      x);
  expect_grad_ok([&](Graph<double>& g, Var<double> v) { return weighted(g, slice(v, 0, 1, 2)); }, x);
  expect_grad_ok([&](Graph<double>& g, Var<double> v) { return weighted(g, slice(v, 1, 2, 3)); }, x);
}

TEST(OpsGrad, Reductions) {
  const auto x = random_tensor({3, 4}, 11);
  expect_grad_ok([&](Graph<double>&, Var<double> v) { return sum(v); }, x);
  expect_grad_ok([&](Graph<double>& g, Var<double> v) { return weighted(g, mean(v, 0)); }, x);
  expect_grad_ok([&](Graph<double>& g, Var<double> v) { return weighted(g, mean(v, 1)); }, x);
}

TEST(OpsGrad, SoftmaxFamily) {
  const auto x = random_tensor({3, 5}, 12, 2.0);
  expect_grad_ok([&](Graph<double>& g, Var<double> v) { return weighted(g, softmax(v, 1)); }, x);
  expect_grad_ok([&](Graph<double>& g, Var<double> v) { return weighted(g, softmax(v, 0)); }, x);
  expect_grad_ok([&](Graph<double>& g, Var<double> v) { return weighted(g, log_softmax(v, 1)); }, x);
}

TEST(OpsGrad, LayerNormAllInputs) {
  const auto x = random_tensor({3, 6}, 13);
  const auto gain = random_tensor({6}, 14);
  const auto bias = random_tensor({6}, 15);
  expect_grad_ok(
      [&](Graph<double>& g, Var<double> v) {
        return weighted(g, layer_norm(v, g.constant(gain), g.constant(bias)));
      },
      x);
  expect_grad_ok(
      [&](Graph<double>& g, Var<double> v) { return weighted(g, layer_norm(g.constant(x), v, g.constant(bias))); },
      gain);
  expect_grad_ok(
      [&](Graph<double>& g, Var<double> v) { return weighted(g, layer_norm(g.constant(x), g.constant(gain), v)); },
      bias);
}

TEST(OpsGrad, Activations) {
  expect_grad_ok([&](Graph<double>& g, Var<double> v) { return weighted(g, gelu(v)); }, random_tensor({4, 4}, 16));
  // Keep relu inputs away from the kink.
  auto x = random_tensor({4, 4}, 17);
  for (auto& v : x.values()) v += v >= 0 ? 0.1 : -0.1;
  expect_grad_ok([&](Graph<double>& g, Var<double> v) { return weighted(g, relu(v)); }, x);
}

TEST(OpsGrad, L2NormalizeAndEmbedding) {
  expect_grad_ok([&](Graph<double>& g, Var<double> v) { return weighted(g, l2_normalize(v)); },
                 random_tensor({3, 5}, 18));
  const std::vector<std::int32_t> ids = {2, 0, 2, 4};
  expect_grad_ok([&](Graph<double>& g, Var<double> v) { return weighted(g, embedding(v, std::span(ids))); },
                 random_tensor({5, 3}, 19));
}

TEST(OpsGrad, NllFromProbs) {
  const std::vector<std::int32_t> labels = {1, 0, 2};
  expect_grad_ok(
      [&](Graph<double>&, Var<double> v) { return nll_from_probs(softmax(v, 1), std::span(labels)); },
      random_tensor({3, 3}, 20));
}

TEST(Ops, SoftmaxRowsAreStochastic) {
  Graph<double> g;
  auto p = softmax(g.constant(random_tensor({6, 9}, 21, 5.0)), 1);
  for (std::size_t r = 0; r < 6; ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < 9; ++c) s += p.value().at(r, c);
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
}

TEST(Ops, NllClampsAtTinyProbability) {
  Graph<double> g;
  const std::vector<std::int32_t> labels = {0};
  auto loss = nll_from_probs(g.constant(Tensor<double>::matrix({{0.0, 1.0}})), std::span(labels));
  EXPECT_NEAR(loss.value().item(), -std::log(1e-12), 1e-9);
}

TEST(Ops, ZeroRowL2NormalizeIsNumericError) {
  Graph<double> g;
  EXPECT_THROW(l2_normalize(g.constant(Tensor<double>({2, 3}))), NumericError);
}

TEST(Ops, NonFiniteInputRejected) {
  Graph<double> g;
  Tensor<double> bad({1, 2});
  bad[1] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(g.constant(bad), NumericError);
}

TEST(Ops, OverflowDetected) {
  Graph<double> g;
  auto x = g.constant(Tensor<double>::matrix({{1e300, 1e300}}));
  EXPECT_THROW(scale(x, 1e10), NumericError);
}

TEST(Ops, ShapeErrorsAreReported) {
  Graph<double> g;
  auto a = g.constant(Tensor<double>({2, 3}));
  auto b = g.constant(Tensor<double>({3, 2}));
  EXPECT_THROW(add(a, b), ShapeError);
  EXPECT_THROW(matmul(a, a), ShapeError);
  EXPECT_THROW(slice(a, 1, 2, 2), ShapeError);
  EXPECT_THROW(add_bias(a, g.constant(Tensor<double>({2}))), ShapeError);
}

TEST(Graph, ParameterNodesAreShared) {
  Parameter<double> p{"w", random_tensor({2, 2}, 22)};
  Graph<double> g;
  auto a = g.param(p);
  auto b = g.param(p);
  EXPECT_EQ(a.id(), b.id());
  g.backward(sum(mul(a, b)));
  const Tensor<double>* grad = g.grad_of(p);
  ASSERT_NE(grad, nullptr);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR((*grad)[i], 2.0 * p.value[i], 1e-12);
}

TEST(Graph, FrozenParameterGetsNoGradient) {
  Parameter<double> p{"w", random_tensor({2, 2}, 23), false};
  Graph<double> g;
  auto x = g.input(random_tensor({2, 2}, 24));
  g.backward(sum(matmul(x, g.param(p))));
  EXPECT_EQ(g.grad_of(p), nullptr);
  EXPECT_NE(g.grad(x), nullptr);
}

TEST(GradCheck, ParamsVariantMatches) {
  Parameter<double> w{"w", random_tensor({3, 2}, 25)};
  Parameter<double> b{"b", random_tensor({2}, 26)};
  const auto x = random_tensor({4, 3}, 27);
  std::vector<Parameter<double>*> params = {&w, &b};
  const auto r = grad_check_params(
      [&](Graph<double>& g) {
        return weighted(g, gelu(add_bias(matmul(g.constant(x), g.param(w)), g.param(b))));
      },
      params);
  EXPECT_LT(r.max_rel_err, 1e-6);
  EXPECT_EQ(r.checked, 8u);
}

TEST(OpNames, AreStable) {
  EXPECT_EQ(op_name(OpKind::kMatMul), "matmul");
  EXPECT_EQ(op_name(OpKind::kSoftmax), "softmax");
}

}  // namespace
}  // namespace aiva::num
