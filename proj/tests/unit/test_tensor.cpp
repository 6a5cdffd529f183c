// Copyright 2026 The AIVA Authors
// SPDX-License-Identifier: Apache-2.0

#include <random>

#include <gtest/gtest.h>

#include "aiva/numerics/ops.hpp"
#include "aiva/numerics/tensor.hpp"

namespace aiva::num {
namespace {

TEST(Tensor, ShapeAndFill) {
  Tensor<float> t({2, 3}, 1.5f);
  EXPECT_EQ(t.rank(), 2u);
  EXPECT_EQ(t.size(), 6u);
  EXPECT_EQ(t.rows(), 2u);
  EXPECT_EQ(t.cols(), 3u);
  for (float v : t.values()) EXPECT_EQ(v, 1.5f);
}

TEST(Tensor, RejectsMismatchedData) {
  EXPECT_THROW(Tensor<double>({2, 2}, std::vector<double>{1, 2, 3}), ShapeError);
}

TEST(Tensor, RejectsEmptyAndZeroExtents) {
  EXPECT_THROW(Tensor<double>(Shape{}), ShapeError);
  EXPECT_THROW(Tensor<double>(Shape{3, 0}), ShapeError);
}

TEST(Tensor, MatrixLiteralIsRowMajor) {
  auto m = Tensor<double>::matrix({{1, 2, 3}, {4, 5, 6}});
  EXPECT_EQ(m.at(0, 2), 3.0);
  EXPECT_EQ(m.at(1, 0), 4.0);
  EXPECT_THROW(Tensor<double>::matrix({{1, 2}, {3}}), ShapeError);
}

TEST(Tensor, ItemNeedsOneElement) {
  EXPECT_EQ(Tensor<double>::scalar(2.5).item(), 2.5);
  EXPECT_THROW(Tensor<double>({2}).item(), ShapeError);
}

TEST(Tensor, RowsOfNonMatrixThrows) {
  Tensor<double> t({2, 2, 2});
  EXPECT_THROW(t.rows(), ShapeError);
  EXPECT_THROW(t.dim(3), ShapeError);
}

TEST(Tensor, CastPreservesShape) {
  auto d = Tensor<double>::matrix({{0.25, -1.0}});
  Tensor<float> f = d.cast<float>();
  EXPECT_EQ(f.shape(), d.shape());
  EXPECT_EQ(f[0], 0.25f);
}

TEST(TensorMatmul, MatchesNaiveTripleLoop) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> dist;
  for (std::size_t trial = 0; trial < 20; ++trial) {
    const std::size_t m = 1 + trial % 7, k = 1 + (trial * 3) % 11, n = 1 + (trial * 5) % 9;
    Tensor<double> a({m, k}), b({k, n});
    for (auto& v : a.values()) v = dist(rng);
    for (auto& v : b.values()) v = dist(rng);
    const Tensor<double> c = matmul(a, b);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        double ref = 0.0;
        for (std::size_t p = 0; p < k; ++p) ref += a.at(i, p) * b.at(p, j);
        EXPECT_NEAR(c.at(i, j), ref, 1e-12);
      }
    }
  }
}

TEST(TensorMatmul, InnerDimensionMismatchThrows) {
  EXPECT_THROW(matmul(Tensor<double>({2, 3}), Tensor<double>({2, 3})), ShapeError);
}

TEST(TensorSoftmax, RowsSumToOne) {
  auto x = Tensor<double>::matrix({{1000, 1001, 999}, {-3, 0, 3}});
  const auto p = softmax(x, 1);
  for (std::size_t r = 0; r < 2; ++r) EXPECT_NEAR(p.at(r, 0) + p.at(r, 1) + p.at(r, 2), 1.0, 1e-12);
  EXPECT_GT(p.at(0, 1), p.at(0, 0));
}

}  // namespace
}  // namespace aiva::num
