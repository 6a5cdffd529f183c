// Copyright 2026 The AIVA Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "aiva/datasets/records.hpp"
#include "aiva/fusion/mspn.hpp"
#include "aiva/training/checkpoint.hpp"
#include "aiva/training/metrics.hpp"

namespace aiva::train {

struct TrainConfig {
  // 2e-5 suits large pretrained encoders. Models trained from scratch at the
  // default desk-scale size need roughly 1e-3 to converge within 10 epochs.
  double learning_rate = 2e-5;
  std::size_t batch_size = 16;
  std::size_t epochs = 10;
  double lambda = 1.0;
  double tau = 0.1;
  std::uint64_t seed = 0;
  std::size_t min_token_freq = 1;
  // vocab_size and labels are filled in from the data when left empty.
  fusion::ModelConfig model;

  void validate() const;
};

void to_json(nlohmann::json& j, const TrainConfig& c);
/// Missing keys keep their current values, so a file can override defaults.
void from_json(const nlohmann::json& j, TrainConfig& c);

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  // Batch loss sums divided by the number of samples seen in the epoch.
  double loss_total = 0.0;
  double loss_cls = 0.0;
  double loss_z2s = 0.0;
  double loss_s2z = 0.0;
  std::optional<double> val_accuracy;
  std::optional<double> val_f1;
  bool operator==(const EpochRecord&) const = default;
};

struct StepRecord {
  std::size_t epoch = 0;
  std::size_t step = 0;  // global, 1-based
  double loss_total = 0.0;
  double loss_cls = 0.0;
  double loss_z2s = 0.0;
  double loss_s2z = 0.0;
};

struct TrainOptions {
  // Parameters whose name and shape match are copied; the vocabulary is
  // reused so embedding tables line up.
  const Checkpoint* warm_start = nullptr;
  std::function<void(const StepRecord&)> on_step;
  std::function<void(const EpochRecord&)> on_epoch;
};

struct TrainResult {
  Checkpoint checkpoint;
  std::vector<EpochRecord> history;
  std::vector<std::string> warm_started;  // parameter names copied from the warm start
};

/// Deterministic given (config, data): shuffling and initialization both
/// derive from config.seed.
TrainResult train(const TrainConfig& config, const data::Dataset& train_set, const data::Dataset& val_set,
                  const TrainOptions& options = {});

/// Tokenizes the text and fits the image to the model's input size.
fusion::ModelInput<float> prepare_input(const std::string& text, const data::RawImage& image,
                                        const enc::Vocabulary& vocab, const fusion::ModelConfig& config);
std::vector<fusion::ModelInput<float>> prepare_inputs(const data::Dataset& records, const enc::Vocabulary& vocab,
                                                      const fusion::ModelConfig& config);

Metrics evaluate(const fusion::Mspn<float>& model, const enc::Vocabulary& vocab, const data::Dataset& records);
Metrics evaluate(const Checkpoint& ckpt, const data::Dataset& records);

/// CSV with header epoch,loss_total,loss_cls,loss_z2s,loss_s2z,val_accuracy,val_f1.
std::string history_csv(const std::vector<EpochRecord>& history);
void write_history_csv(const std::vector<EpochRecord>& history, const std::filesystem::path& path);

}  // namespace aiva::train
