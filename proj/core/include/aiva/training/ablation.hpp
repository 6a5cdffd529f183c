// Copyright 2026 The AIVA Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "aiva/training/trainer.hpp"

namespace aiva::train {

enum class Variant {
  kFull,
  kNoCaf,   // Z0 = [T; V] instead of cross attention
  kNoCmft,  // prototypes attend once to Z0, no fusion stack
  kNoScl,   // lambda = 0
};

std::string to_string(Variant v);
Variant parse_variant(const std::string& name);
TrainConfig apply_variant(TrainConfig config, Variant v);

struct AblationRun {
  std::string variant;
  std::uint64_t seed = 0;
  double accuracy = 0.0;
  double f1 = 0.0;
};

struct AblationSummary {
  std::string variant;
  double accuracy_mean = 0.0;
  double accuracy_std = 0.0;  // sample standard deviation, 0 for one seed
  double f1_mean = 0.0;
  double f1_std = 0.0;
};

struct AblationTable {
  std::vector<AblationRun> runs;
  std::vector<AblationSummary> summary;  // one per variant, in run order

  const AblationSummary& find(const std::string& variant) const;
};

/// Header variant,seed,accuracy,f1. One row per run, then "mean" and "std"
/// rows per variant in the seed column.
std::string ablation_csv(const AblationTable& table);

using RunCallback = std::function<void(const AblationRun&)>;

/// Trains every (variant, seed) pair on `train_set` and scores it on `eval_set`.
AblationTable run_ablation(const TrainConfig& base, const data::Dataset& train_set, const data::Dataset& eval_set,
                           std::span<const Variant> variants, std::span<const std::uint64_t> seeds,
                           const RunCallback& on_run = {});

/// Same protocol over a grid of lambda values; rows are named "lambda=<v>".
AblationTable run_lambda_sweep(const TrainConfig& base, const data::Dataset& train_set, const data::Dataset& eval_set,
                               std::span<const double> lambdas, std::span<const std::uint64_t> seeds,
                               const RunCallback& on_run = {});

AblationTable summarize(std::vector<AblationRun> runs);

}  // namespace aiva::train
