// Copyright 2026 The AIVA Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "aiva/training/adam.hpp"

namespace aiva::train {
namespace {

using num::Parameter;
using num::Tensor;

struct Fixture {
  Parameter<double> w{"w", Tensor<double>::matrix({{0.5, -1.0, 2.0}, {0.0, 3.0, -0.25}})};
  Parameter<double> b{"b", Tensor<double>({3}, 0.1)};
  std::vector<Parameter<double>*> params{&w, &b};
  AdamState<double> state = AdamState<double>::zeros(params);
};

TEST(Adam, FirstStepClosedForm) {
  const AdamConfig cfg;
  const std::vector<double> gs = {1e-3, -0.02, 0.7, -5.0, 123.0, 1e-4};
  Parameter<double> p{"p", Tensor<double>({6}, 1.0)};
  Tensor<double> g({6}, gs);
  std::vector<Parameter<double>*> params{&p};
  std::vector<const Tensor<double>*> grads{&g};
  auto state = AdamState<double>::zeros(params, cfg);
  const double lr = 0.01;
  adam_step<double>(params, grads, state, lr);
  for (std::size_t k = 0; k < gs.size(); ++k) {
    // Bias-corrected moments at t=1 are g and g², so the step is -lr·g/(|g|+eps).
    const double exact = -lr * gs[k] / (std::abs(gs[k]) + cfg.eps);
    EXPECT_NEAR(p.value[k] - 1.0, exact, 1e-15);
    // Reference form with eps applied to the uncorrected moments.
    const double eps_hat = cfg.eps * std::sqrt(1.0 - cfg.beta2) / (1.0 - cfg.beta1);
    const double reference = -lr * gs[k] / (std::abs(gs[k]) + eps_hat);
    EXPECT_NEAR((p.value[k] - 1.0) / reference, 1.0, 1e-4);
  }
  EXPECT_EQ(state.step, 1u);
}

TEST(Adam, ZeroGradientKeepsParamsAndMoments) {
  Fixture f;
  const auto w0 = f.w.value;
  Tensor<double> gw(f.w.value.shape());
  std::vector<const Tensor<double>*> grads{&gw, nullptr};
  adam_step<double>(f.params, grads, f.state, 0.1);
  EXPECT_EQ(f.w.value, w0);
  for (double m : f.state.m[0].values()) EXPECT_EQ(m, 0.0);
  for (double v : f.state.v[1].values()) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(f.state.step, 1u);
}

TEST(Adam, ZeroLearningRateIsIdentity) {
  Fixture f;
  const auto w0 = f.w.value;
  const auto b0 = f.b.value;
  Tensor<double> gw(f.w.value.shape(), 0.3), gb(f.b.value.shape(), -2.0);
  std::vector<const Tensor<double>*> grads{&gw, &gb};
  for (int i = 0; i < 3; ++i) adam_step<double>(f.params, grads, f.state, 0.0);
  EXPECT_EQ(f.w.value, w0);
  EXPECT_EQ(f.b.value, b0);
  EXPECT_THROW(adam_step<double>(f.params, grads, f.state, -1.0), ValueError);
}

TEST(Adam, DeterministicAcrossRuns) {
  auto run = [] {
    Fixture f;
    std::mt19937_64 rng(7);
    std::normal_distribution<double> dist;
    for (int step = 0; step < 20; ++step) {
      Tensor<double> gw(f.w.value.shape()), gb(f.b.value.shape());
      for (auto& v : gw.values()) v = dist(rng);
      for (auto& v : gb.values()) v = dist(rng);
      std::vector<const Tensor<double>*> grads{&gw, &gb};
      adam_step<double>(f.params, grads, f.state, 1e-2);
    }
    return std::pair{f.w.value, f.b.value};
  };
  EXPECT_EQ(run(), run());
}

TEST(Adam, MinimizesQuadratic) {
  Parameter<double> x{"x", Tensor<double>({2}, std::vector<double>{3.0, -4.0})};
  std::vector<Parameter<double>*> params{&x};
  auto state = AdamState<double>::zeros(params);
  for (int step = 0; step < 2000; ++step) {
    Tensor<double> g({2}, std::vector<double>{2.0 * x.value[0], 2.0 * x.value[1]});
    std::vector<const Tensor<double>*> grads{&g};
    adam_step<double>(params, grads, state, 0.05);
  }
  EXPECT_NEAR(x.value[0], 0.0, 1e-2);
  EXPECT_NEAR(x.value[1], 0.0, 1e-2);
}

TEST(Adam, FrozenParametersAreSkipped) {
  Fixture f;
  f.b.trainable = false;
  const auto b0 = f.b.value;
  Tensor<double> gw(f.w.value.shape(), 1.0), gb(f.b.value.shape(), 1.0);
  std::vector<const Tensor<double>*> grads{&gw, &gb};
  adam_step<double>(f.params, grads, f.state, 0.1);
  EXPECT_EQ(f.b.value, b0);
  EXPECT_NE(f.w.value[0], 0.5);
}

TEST(Adam, ShapeMismatchThrows) {
  Fixture f;
  Tensor<double> wrong({3, 2});
  std::vector<const Tensor<double>*> grads{&wrong, nullptr};
  EXPECT_THROW(adam_step<double>(f.params, grads, f.state, 0.1), ShapeError);
  std::vector<const Tensor<double>*> too_few{nullptr};
  EXPECT_THROW(adam_step<double>(f.params, too_few, f.state, 0.1), ShapeError);
}

}  // namespace
}  // namespace aiva::train
