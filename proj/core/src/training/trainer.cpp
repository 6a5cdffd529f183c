// Copyright 2026 The AIVA Authors
// SPDX-License-Identifier: Apache-2.0

#include "aiva/training/trainer.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "aiva/datasets/batching.hpp"
#include "aiva/error.hpp"
#include "aiva/objectives/losses.hpp"
#include "aiva/training/adam.hpp"

namespace aiva::train {
namespace {

constexpr std::uint64_t kShuffleSalt = 0xd1b54a32d192ed03ULL;

std::vector<std::int32_t> labels_of(const data::Dataset& records) {
  std::vector<std::int32_t> labels;
  labels.reserve(records.size());
  for (const auto& r : records) labels.push_back(r.label);
  return labels;
}

Metrics evaluate_prepared(const fusion::Mspn<float>& model, const std::vector<fusion::ModelInput<float>>& inputs,
                          std::span<const std::int32_t> labels) {
  if (inputs.empty()) throw ValueError("evaluate: empty dataset");
  std::vector<std::int32_t> predicted;
  predicted.reserve(inputs.size());
  for (const auto& in : inputs) predicted.push_back(model.predict(in).label);
  return compute_metrics(labels, predicted, model.config().n_classes);
}

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ValueError("learning_rate must be positive, got " + fmt_double(learning_rate));
  }
  if (batch_size < 2) throw ValueError("batch_size must be at least 2, got " + std::to_string(batch_size));
  if (epochs < 1) throw ValueError("epochs must be at least 1");
  obj::LossConfig{lambda}.validate();
  obj::ContrastiveConfig{tau}.validate();
}

void to_json(nlohmann::json& j, const TrainConfig& c) {
  j = nlohmann::json{{"learning_rate", c.learning_rate},
                     {"batch_size", c.batch_size},
                     {"epochs", c.epochs},
                     {"lambda", c.lambda},
                     {"tau", c.tau},
                     {"seed", c.seed},
                     {"min_token_freq", c.min_token_freq},
                     {"model", c.model}};
}

void from_json(const nlohmann::json& j, TrainConfig& c) {
  if (!j.is_object()) throw ValueError("training config must be a JSON object");
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.epochs = j.value("epochs", c.epochs);
  c.lambda = j.value("lambda", c.lambda);
  c.tau = j.value("tau", c.tau);
  c.seed = j.value("seed", c.seed);
  c.min_token_freq = j.value("min_token_freq", c.min_token_freq);
  if (j.contains("model")) {
    // Merge so that a partial "model" object only overrides what it names.
    nlohmann::json merged = c.model;
    merged.update(j.at("model"));
    c.model = merged.get<fusion::ModelConfig>();
  }
}

fusion::ModelInput<float> prepare_input(const std::string& text, const data::RawImage& image,
                                        const enc::Vocabulary& vocab, const fusion::ModelConfig& config) {
  fusion::ModelInput<float> in;
  in.tokens = enc::tokenize(text, vocab, config.max_len);
  in.image = data::to_tensor<float>(data::fit_image(image, config.image_height, config.image_width, config.channels));
  return in;
}

std::vector<fusion::ModelInput<float>> prepare_inputs(const data::Dataset& records, const enc::Vocabulary& vocab,
                                                      const fusion::ModelConfig& config) {
  std::vector<fusion::ModelInput<float>> inputs;
  inputs.reserve(records.size());
  for (const auto& r : records) inputs.push_back(prepare_input(r.text, data::resolve_image(r.image), vocab, config));
  return inputs;
}

TrainResult train(const TrainConfig& config, const data::Dataset& train_set, const data::Dataset& val_set,
                  const TrainOptions& options) {
  config.validate();
  if (train_set.empty()) throw ValueError("train: empty training set");
  fusion::ModelConfig mc = config.model;
  if (options.warm_start) {
    // Architecture follows the warm start; only the label space may change.
    mc = options.warm_start->config;
    mc.n_classes = config.model.n_classes;
    mc.labels = config.model.labels;
  }
  if (mc.labels.empty()) mc.labels = fusion::default_labels(mc.n_classes);
  data::validate_dataset(train_set, mc.n_classes);
  data::validate_dataset(val_set, mc.n_classes);
  if (train_set.size() < config.batch_size) {
    throw ValueError("train: " + std::to_string(train_set.size()) + " training records cannot fill one batch of " +
                     std::to_string(config.batch_size));
  }

  enc::Vocabulary vocab;
  if (options.warm_start) {
    vocab = options.warm_start->vocab;
  } else {
    std::vector<std::string> texts;
    for (const auto& r : train_set) texts.push_back(r.text);
    vocab = enc::Vocabulary::build(texts, config.min_token_freq);
  }
  mc.vocab_size = vocab.size();
  mc.validate();

  fusion::Mspn<float> model(mc, config.seed);
  TrainResult result;
  if (options.warm_start) {
    result.warm_started = copy_matching(*options.warm_start, model);
    spdlog::info("warm start: copied {} of {} parameters", result.warm_started.size(), model.parameters().size());
  }

  const auto inputs = prepare_inputs(train_set, vocab, mc);
  const auto labels = labels_of(train_set);
  const auto val_inputs = prepare_inputs(val_set, vocab, mc);
  const auto val_labels = labels_of(val_set);

  auto params = model.parameters();
  auto adam = AdamState<float>::zeros(params);
  const obj::LossConfig loss_cfg{config.lambda};
  const obj::ContrastiveConfig contrastive_cfg{config.tau};
  std::vector<const num::Tensor<float>*> grads(params.size());
  std::size_t step = 0;

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto batches = data::make_batches(inputs.size(), config.batch_size, config.seed ^ (kShuffleSalt * epoch));
    EpochRecord rec;
    rec.epoch = epoch;
    std::size_t seen = 0;
    for (const data::Batch& batch : batches) {
      std::vector<const fusion::ModelInput<float>*> batch_inputs;
      std::vector<std::int32_t> batch_labels;
      for (std::size_t i : batch) {
        batch_inputs.push_back(&inputs[i]);
        batch_labels.push_back(labels[i]);
      }
      num::Graph<float> g;
      const auto objective = obj::batch_objective<float>(g, model, batch_inputs, batch_labels, loss_cfg, contrastive_cfg);
      g.backward(objective.total);
      for (std::size_t p = 0; p < params.size(); ++p) grads[p] = g.grad_of(*params[p]);
      adam_step<float>(params, grads, adam, config.learning_rate);

      StepRecord sr{epoch,
                    ++step,
                    static_cast<double>(objective.total.value().item()),
                    static_cast<double>(objective.classification.value().item()),
                    static_cast<double>(objective.z_to_s.value().item()),
                    static_cast<double>(objective.s_to_z.value().item())};
      rec.loss_total += sr.loss_total;
      rec.loss_cls += sr.loss_cls;
      rec.loss_z2s += sr.loss_z2s;
      rec.loss_s2z += sr.loss_s2z;
      seen += batch.size();
      if (options.on_step) options.on_step(sr);
    }
    const auto n = static_cast<double>(seen);
    rec.loss_total /= n;
    rec.loss_cls /= n;
    rec.loss_z2s /= n;
    rec.loss_s2z /= n;
    if (!val_inputs.empty()) {
      const Metrics m = evaluate_prepared(model, val_inputs, val_labels);
      rec.val_accuracy = m.accuracy;
      rec.val_f1 = m.macro_f1;
    }
    spdlog::info("epoch {}/{}: loss {:.4f} (cls {:.4f}, z2s {:.4f}, s2z {:.4f}){}", epoch, config.epochs,
                 rec.loss_total, rec.loss_cls, rec.loss_z2s, rec.loss_s2z,
                 rec.val_accuracy ? fmt::format(", val acc {:.4f}", *rec.val_accuracy) : std::string());
    result.history.push_back(rec);
    if (options.on_epoch) options.on_epoch(rec);
  }

  TrainingMetadata meta;
  meta.epoch = config.epochs;
  meta.seed = config.seed;
  meta.loss_total = result.history.back().loss_total;
  meta.loss_cls = result.history.back().loss_cls;
  meta.loss_z2s = result.history.back().loss_z2s;
  meta.loss_s2z = result.history.back().loss_s2z;
  TrainConfig effective = config;
  effective.model = mc;
  meta.train_config = effective;
  result.checkpoint = make_checkpoint(model, vocab, std::move(meta));
  return result;
}

Metrics evaluate(const fusion::Mspn<float>& model, const enc::Vocabulary& vocab, const data::Dataset& records) {
  if (records.empty()) throw ValueError("evaluate: empty dataset");
  data::validate_dataset(records, model.config().n_classes);
  const auto labels = labels_of(records);
  return evaluate_prepared(model, prepare_inputs(records, vocab, model.config()), labels);
}

Metrics evaluate(const Checkpoint& ckpt, const data::Dataset& records) {
  return evaluate(model_from_checkpoint(ckpt), ckpt.vocab, records);
}

std::string history_csv(const std::vector<EpochRecord>& history) {
  std::ostringstream out;
  out << "epoch,loss_total,loss_cls,loss_z2s,loss_s2z,val_accuracy,val_f1\n";
  for (const EpochRecord& r : history) {
    out << r.epoch << ',' << fmt_double(r.loss_total) << ',' << fmt_double(r.loss_cls) << ','
        << fmt_double(r.loss_z2s) << ',' << fmt_double(r.loss_s2z) << ','
        << (r.val_accuracy ? fmt_double(*r.val_accuracy) : "") << ','
        << (r.val_f1 ? fmt_double(*r.val_f1) : "") << '\n';
  }
  return out.str();
}

void write_history_csv(const std::vector<EpochRecord>& history, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << history_csv(history);
}

}  // namespace aiva::train
