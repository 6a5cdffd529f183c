// Copyright 2026 The AIVA Authors
// SPDX-License-Identifier: Apache-2.0

#include "aiva/training/metrics.hpp"

#include <string>

#include <nlohmann/json.hpp>

#include "aiva/error.hpp"

namespace aiva::train {
namespace {

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

Metrics metrics_from_confusion(const Confusion& confusion) {
  const std::size_t c = confusion.size();
  if (c == 0) throw ValueError("metrics: no classes");
  for (const auto& row : confusion)
    if (row.size() != c) throw ShapeError("metrics: confusion matrix must be square");

  Metrics m;
  m.confusion = confusion;
  std::size_t total = 0, trace = 0;
  for (std::size_t k = 0; k < c; ++k) {
    trace += confusion[k][k];
    for (std::size_t j = 0; j < c; ++j) total += confusion[k][j];
  }
  if (total == 0) throw ValueError("metrics: empty dataset");
  m.accuracy = ratio(trace, total);

  for (std::size_t k = 0; k < c; ++k) {
    std::size_t predicted = 0, actual = 0;
    for (std::size_t j = 0; j < c; ++j) {
      predicted += confusion[j][k];
      actual += confusion[k][j];
    }
    const double precision = ratio(confusion[k][k], predicted);
    const double recall = ratio(confusion[k][k], actual);
    const double f1 = precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    m.macro_precision += precision;
    m.macro_recall += recall;
    m.per_class_f1.push_back(f1);
    m.macro_f1 += f1;
  }
  m.macro_precision /= static_cast<double>(c);
  m.macro_recall /= static_cast<double>(c);
  m.macro_f1 /= static_cast<double>(c);
  return m;
}

Metrics compute_metrics(std::span<const std::int32_t> truth, std::span<const std::int32_t> predicted,
                        std::size_t n_classes) {
  if (truth.size() != predicted.size()) {
    throw ShapeError("metrics: " + std::to_string(truth.size()) + " labels but " + std::to_string(predicted.size()) +
                     " predictions");
  }
  if (truth.empty()) throw ValueError("metrics: empty dataset");
  Confusion confusion(n_classes, std::vector<std::size_t>(n_classes, 0));
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] < 0 || static_cast<std::size_t>(truth[i]) >= n_classes || predicted[i] < 0 ||
        static_cast<std::size_t>(predicted[i]) >= n_classes) {
      throw ValueError("metrics: label out of range [0, " + std::to_string(n_classes) + ")");
    }
    ++confusion[static_cast<std::size_t>(truth[i])][static_cast<std::size_t>(predicted[i])];
  }
  return metrics_from_confusion(confusion);
}

void to_json(nlohmann::json& j, const Metrics& m) {
  j = nlohmann::json{{"accuracy", m.accuracy},
                     {"macro_precision", m.macro_precision},
                     {"macro_recall", m.macro_recall},
                     {"macro_f1", m.macro_f1},
                     {"per_class_f1", m.per_class_f1},
                     {"confusion", m.confusion}};
}

}  // namespace aiva::train
