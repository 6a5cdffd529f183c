// Copyright 2026 The AIVA Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace aiva::train {

/// Rows are true classes, columns predicted classes.
using Confusion = std::vector<std::vector<std::size_t>>;

/// Macro averages weight every class equally. A class with no predictions
/// has precision 0, one with no instances recall 0, and F1 is 0 whenever
/// precision + recall is 0.
struct Metrics {
  double accuracy = 0.0;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  std::vector<double> per_class_f1;
  Confusion confusion;
};

Metrics metrics_from_confusion(const Confusion& confusion);
Metrics compute_metrics(std::span<const std::int32_t> truth, std::span<const std::int32_t> predicted,
                        std::size_t n_classes);

void to_json(nlohmann::json& j, const Metrics& m);

}  // namespace aiva::train
