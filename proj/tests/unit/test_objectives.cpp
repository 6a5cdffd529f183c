// Copyright 2026 The AIVA Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "aiva/numerics/grad_check.hpp"
#include "aiva/objectives/losses.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

namespace aiva::obj {
namespace {

using num::Graph;
using num::Tensor;
using testing::Rows;

Tensor<double> to_tensor(const Rows& rows) {
  Tensor<double> t({rows.size(), rows.front().size()});
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c) t.at(r, c) = rows[r][c];
  return t;
}

Rows random_rows(std::size_t n, std::size_t d, std::mt19937_64& rng) {
  std::normal_distribution<double> dist;
  Rows rows(n, std::vector<double>(d));
  for (auto& row : rows)
    for (double& v : row) v = dist(rng);
  return rows;
}

double z2s(const Rows& z, const Rows& s, const std::vector<std::int32_t>& y, double tau) {
  Graph<double> g;
  return supcon_z_to_s(g.constant(to_tensor(z)), g.constant(to_tensor(s)), std::span(y), ContrastiveConfig{tau})
      .value()
      .item();
}

double s2z(const Rows& s, const Rows& z, const std::vector<std::int32_t>& y, double tau) {
  Graph<double> g;
  return supcon_s_to_z(g.constant(to_tensor(s)), g.constant(to_tensor(z)), std::span(y), ContrastiveConfig{tau})
      .value()
      .item();
}

TEST(ClassificationLoss, UniformIsLnC) {
  for (std::size_t c : {2u, 3u, 7u}) {
    Graph<double> g;
    const std::vector<std::int32_t> y = {0};
    const auto loss = classification_loss(g.constant(Tensor<double>({1, c}, 1.0 / static_cast<double>(c))), std::span(y));
    EXPECT_NEAR(loss.value().item(), std::log(static_cast<double>(c)), 1e-12);
  }
}

TEST(ClassificationLoss, KnownValues) {
  Graph<double> g;
  const std::vector<std::int32_t> y0 = {0};
  EXPECT_NEAR(classification_loss(g.constant(Tensor<double>::matrix({{0.7, 0.2, 0.1}})), std::span(y0)).value().item(),
              0.356675, 1e-6);
  EXPECT_EQ(classification_loss(g.constant(Tensor<double>::matrix({{1.0, 0.0, 0.0}})), std::span(y0)).value().item(),
            0.0);
}

TEST(ClassificationLoss, LabelOutOfRangeThrows) {
  Graph<double> g;
  const std::vector<std::int32_t> y = {3};
  EXPECT_THROW(classification_loss(g.constant(Tensor<double>({1, 3}, 1.0 / 3)), std::span(y)), Error);
}

TEST(SupconZToS, EqualSimilaritiesGiveNLnC) {
  const Rows same(4, std::vector<double>{1.0, 2.0, -1.0});
  const Rows protos(3, std::vector<double>{1.0, 2.0, -1.0});
  EXPECT_NEAR(z2s(same, protos, {0, 1, 2, 0}, 0.1), 4.0 * std::log(3.0), 1e-9);
}

TEST(SupconZToS, SmallTemperatureWithCorrectPrototypeGoesToZero) {
  const Rows protos = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  const Rows z = {{0.9, 0.1, 0.0}, {0.0, 1.0, 0.2}, {0.1, 0.0, 2.0}};
  EXPECT_LT(z2s(z, protos, {0, 1, 2}, 0.01), 1e-12);
}

TEST(SupconSToZ, EqualSimilaritiesTwoClasses) {
  const Rows z(4, std::vector<double>{0.5, 0.5});
  const Rows s(2, std::vector<double>{0.5, 0.5});
  EXPECT_NEAR(s2z(s, z, {0, 1, 0, 1}, 0.1), 2.0 * std::log(4.0), 1e-9);
}

TEST(SupconSToZ, AbsentClassesContributeNothing) {
  std::mt19937_64 rng(1);
  const Rows z = random_rows(3, 4, rng);
  Rows s = random_rows(3, 4, rng);
  const double before = s2z(s, z, {0, 0, 0}, 0.5);
  s[1] = {9, 9, 9, 9};
  s[2] = {-1, 2, -3, 4};
  EXPECT_EQ(s2z(s, z, {0, 0, 0}, 0.5), before);
}

TEST(Supcon, MatchesScalarOracle) {
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<std::size_t> pick_n(1, 6), pick_c(2, 4), pick_d(1, 8);
  std::uniform_real_distribution<double> pick_tau(0.05, 1.5);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = pick_n(rng), c = pick_c(rng), d = pick_d(rng);
    const double tau = pick_tau(rng);
    const Rows z = random_rows(n, d, rng);
    const Rows s = random_rows(c, d, rng);
    std::uniform_int_distribution<std::int32_t> pick_y(0, static_cast<std::int32_t>(c) - 1);
    std::vector<std::int32_t> y(n);
    for (auto& v : y) v = pick_y(rng);
    const double ref_zs = testing::oracle_z_to_s(z, s, y, tau);
    const double ref_sz = testing::oracle_s_to_z(s, z, y, tau);
    EXPECT_NEAR(z2s(z, s, y, tau), ref_zs, 1e-9 * std::max(1.0, std::abs(ref_zs)));
    EXPECT_NEAR(s2z(s, z, y, tau), ref_sz, 1e-9 * std::max(1.0, std::abs(ref_sz)));
  }
}

TEST(Supcon, InvariantToPositiveRescaling) {
  std::mt19937_64 rng(5);
  Rows z = random_rows(5, 6, rng);
  Rows s = random_rows(3, 6, rng);
  const std::vector<std::int32_t> y = {0, 2, 1, 1, 0};
  const double a = z2s(z, s, y, 0.1), b = s2z(s, z, y, 0.1);
  for (auto& row : z)
    for (double& v : row) v *= 7.5;
  for (auto& row : s)
    for (double& v : row) v *= 0.02;
  EXPECT_NEAR(z2s(z, s, y, 0.1), a, 1e-5);
  EXPECT_NEAR(s2z(s, z, y, 0.1), b, 1e-5);
}

TEST(Supcon, InvariantToBatchPermutation) {
  std::mt19937_64 rng(6);
  const Rows z = random_rows(5, 4, rng);
  const Rows s = random_rows(3, 4, rng);
  const std::vector<std::int32_t> y = {0, 2, 1, 1, 0};
  const std::vector<std::size_t> perm = {3, 0, 4, 1, 2};
  Rows zp;
  std::vector<std::int32_t> yp;
  for (std::size_t i : perm) {
    zp.push_back(z[i]);
    yp.push_back(y[i]);
  }
  EXPECT_NEAR(z2s(zp, s, yp, 0.2), z2s(z, s, y, 0.2), 1e-12);
  EXPECT_NEAR(s2z(s, zp, yp, 0.2), s2z(s, z, y, 0.2), 1e-12);
}

TEST(Supcon, ZeroVectorIsNumericError) {
  const Rows z = {{0, 0}, {1, 1}};
  const Rows s = {{1, 0}, {0, 1}};
  EXPECT_THROW(z2s(z, s, {0, 1}, 0.1), NumericError);
  EXPECT_THROW(s2z(s, z, {0, 1}, 0.1), NumericError);
}

TEST(Supcon, BadConfigAndLabelsThrow) {
  const Rows z = {{1, 0}};
  const Rows s = {{1, 0}, {0, 1}};
  EXPECT_THROW(z2s(z, s, {0}, 0.0), ValueError);
  EXPECT_THROW(z2s(z, s, {2}, 0.1), ValueError);
  EXPECT_THROW(z2s(z, s, {0, 1}, 0.1), ShapeError);
  EXPECT_THROW(s2z(s, {{1, 0, 0}}, {0}, 0.1), ShapeError);
}

TEST(Supcon, GradientsMatchFiniteDifferences) {
  std::mt19937_64 rng(8);
  const Tensor<double> z = to_tensor(random_rows(4, 5, rng));
  const Tensor<double> s = to_tensor(random_rows(3, 5, rng));
  const std::vector<std::int32_t> y = {0, 1, 1, 2};
  const ContrastiveConfig cfg{0.3};
  auto r = num::grad_check([&](Graph<double>& g, num::Var<double> v) { return supcon_z_to_s(v, g.constant(s), std::span(y), cfg); }, z);
  EXPECT_LT(r.max_rel_err, 1e-4);
  r = num::grad_check([&](Graph<double>& g, num::Var<double> v) { return supcon_z_to_s(g.constant(z), v, std::span(y), cfg); }, s);
  EXPECT_LT(r.max_rel_err, 1e-4);
  r = num::grad_check([&](Graph<double>& g, num::Var<double> v) { return supcon_s_to_z(v, g.constant(z), std::span(y), cfg); }, s);
  EXPECT_LT(r.max_rel_err, 1e-4);
  r = num::grad_check([&](Graph<double>& g, num::Var<double> v) { return supcon_s_to_z(g.constant(s), v, std::span(y), cfg); }, z);
  EXPECT_LT(r.max_rel_err, 1e-4);
}

TEST(TotalLoss, Arithmetic) {
  EXPECT_DOUBLE_EQ(total_loss(1.0, 0.4, 0.6, LossConfig{2.0}), 2.0);
  EXPECT_EQ(total_loss(0.8125, 3.0, 1.5, LossConfig{0.0}), 0.8125);
  EXPECT_THROW(total_loss(1.0, 1.0, 1.0, LossConfig{-1.0}), ValueError);
  EXPECT_EQ(LossConfig{}.lambda, 1.0);
}

TEST(TotalLoss, MonotoneInLambdaForPositiveTerms) {
  double prev = -1.0;
  for (double lambda : {0.0, 0.5, 1.0, 1.5, 2.0}) {
    const double v = total_loss(0.7, 0.2, 0.3, LossConfig{lambda});
    EXPECT_GE(v, prev);
    prev = v;
  }
}

TEST(TotalLoss, GraphVersionAgreesWithScalar) {
  Graph<double> g;
  const auto v = total_loss(g.constant(Tensor<double>::scalar(1.25)), g.constant(Tensor<double>::scalar(0.5)),
                            g.constant(Tensor<double>::scalar(0.75)), LossConfig{1.5});
  EXPECT_EQ(v.value().item(), total_loss(1.25, 0.5, 0.75, LossConfig{1.5}));
}

TEST(MaskedMeanPool, SkipsMaskedRows) {
  Graph<double> g;
  const auto z = g.constant(Tensor<double>::matrix({{1, 2}, {3, 4}, {100, 100}}));
  const std::vector<std::uint8_t> mask = {1, 1, 0};
  const auto pooled = masked_mean_pool(z, std::span(mask)).value();
  EXPECT_EQ(pooled.shape(), (num::Shape{1, 2}));
  EXPECT_DOUBLE_EQ(pooled[0], 2.0);
  EXPECT_DOUBLE_EQ(pooled[1], 3.0);
  const std::vector<std::uint8_t> none = {0, 0, 0};
  EXPECT_THROW(masked_mean_pool(z, std::span(none)), ValueError);
}

TEST(BatchObjective, LambdaZeroTotalIsClassificationExactly) {
  const auto cfg = testing::tiny_config();
  fusion::Mspn<double> model(cfg, 3);
  std::mt19937_64 rng(2);
  std::vector<fusion::ModelInput<double>> inputs;
  for (int i = 0; i < 3; ++i) inputs.push_back(testing::random_input<double>(cfg, rng));
  std::vector<const fusion::ModelInput<double>*> ptrs;
  for (const auto& in : inputs) ptrs.push_back(&in);
  const std::vector<std::int32_t> y = {0, 1, 2};
  Graph<double> g;
  const auto obj = batch_objective(g, model, std::span<const fusion::ModelInput<double>* const>(ptrs), std::span(y),
                                   LossConfig{0.0}, ContrastiveConfig{});
  EXPECT_EQ(obj.total.value().item(), obj.classification.value().item());
  EXPECT_GT(obj.z_to_s.value().item(), 0.0);
  EXPECT_EQ(obj.probs.shape(), (num::Shape{3, 3}));
  EXPECT_EQ(obj.pooled.shape(), (num::Shape{3, cfg.d_model}));
  EXPECT_EQ(obj.prototypes.shape(), (num::Shape{3, cfg.d_model}));
}

}  // namespace
}  // namespace aiva::obj
