// Copyright 2026 The AIVA Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <random>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "aiva/error.hpp"
#include "aiva/training/metrics.hpp"

namespace aiva::train {
namespace {

TEST(Metrics, TwoByTwoConfusion) {
  // Precision and recall are 2/3 for both classes.
  const Metrics m = metrics_from_confusion({{2, 1}, {1, 2}});
  EXPECT_NEAR(m.accuracy, 4.0 / 6.0, 1e-12);
  EXPECT_NEAR(m.macro_precision, 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(m.macro_recall, 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(m.macro_f1, 2.0 / 3.0, 1e-12);
}

TEST(Metrics, PerfectPredictions) {
  const std::vector<std::int32_t> y = {0, 1, 2, 2, 1, 0};
  const Metrics m = compute_metrics(y, y, 3);
  EXPECT_EQ(m.accuracy, 1.0);
  EXPECT_EQ(m.macro_f1, 1.0);
}

TEST(Metrics, SingleClassPredictorOnBalancedSet) {
  const std::vector<std::int32_t> truth = {0, 1, 2, 0, 1, 2};
  const std::vector<std::int32_t> pred(6, 1);
  const Metrics m = compute_metrics(truth, pred, 3);
  EXPECT_NEAR(m.accuracy, 1.0 / 3.0, 1e-12);
  // Classes 0 and 2 have no predictions, so their F1 is 0.
  EXPECT_EQ(m.per_class_f1[0], 0.0);
  EXPECT_NEAR(m.per_class_f1[1], 0.5, 1e-12);
  EXPECT_NEAR(m.macro_f1, 0.5 / 3.0, 1e-12);
}

TEST(Metrics, RandomizedInvariants) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t c = 2 + trial % 5;
    std::uniform_int_distribution<std::int32_t> pick(0, static_cast<std::int32_t>(c) - 1);
    std::vector<std::int32_t> truth(40), pred(40);
    for (std::size_t i = 0; i < 40; ++i) {
      truth[i] = pick(rng);
      pred[i] = rng() % 2 ? truth[i] : pick(rng);
    }
    const Metrics m = compute_metrics(truth, pred, c);
    std::size_t trace = 0, total = 0;
    for (std::size_t r = 0; r < c; ++r)
      for (std::size_t k = 0; k < c; ++k) {
        total += m.confusion[r][k];
        if (r == k) trace += m.confusion[r][k];
      }
    EXPECT_EQ(total, 40u);
    EXPECT_DOUBLE_EQ(m.accuracy, static_cast<double>(trace) / 40.0);
    EXPECT_LE(m.macro_f1, *std::max_element(m.per_class_f1.begin(), m.per_class_f1.end()) + 1e-12);
  }
}

TEST(Metrics, RejectsBadInput) {
  const std::vector<std::int32_t> a = {0, 1};
  const std::vector<std::int32_t> b = {0};
  const std::vector<std::int32_t> out_of_range = {0, 3};
  EXPECT_THROW(compute_metrics(a, b, 2), ShapeError);
  EXPECT_THROW(compute_metrics(a, out_of_range, 2), ValueError);
}

TEST(Metrics, JsonFields) {
  const nlohmann::json j = metrics_from_confusion({{1, 0}, {0, 1}});
  EXPECT_EQ(j.at("accuracy"), 1.0);
  EXPECT_TRUE(j.contains("macro_f1"));
  EXPECT_TRUE(j.contains("confusion"));
}

}  // namespace
}  // namespace aiva::train
