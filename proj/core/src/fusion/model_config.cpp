// Copyright 2026 The AIVA Authors
// SPDX-License-Identifier: Apache-2.0

#include "aiva/fusion/model_config.hpp"

#include <nlohmann/json.hpp>

#include "aiva/error.hpp"

namespace aiva::fusion {

std::vector<std::string> default_labels(std::size_t n_classes) {
  if (n_classes == 3) return {"positive", "neutral", "negative"};
  if (n_classes == 7) return {"Angry", "Bored", "Calm", "Fear", "Happy", "Love", "Sad"};
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < n_classes; ++i) labels.push_back("class_" + std::to_string(i));
  return labels;
}

void ModelConfig::validate() const {
  if (d_model < 2) throw ValueError("model config: d_model must be at least 2");
  if (heads == 0 || d_model % heads != 0) {
    throw ValueError("model config: d_model " + std::to_string(d_model) + " is not divisible by heads " +
                     std::to_string(heads));
  }
  if (max_len == 0) throw ValueError("model config: max_len must be at least 1");
  if (ffn_mult == 0) throw ValueError("model config: ffn_mult must be positive");
  image_shape().validate();
  if (n_classes < 2) throw ValueError("model config: n_classes must be at least 2");
  if (n_fusion_layers == 0) throw ValueError("model config: n_fusion_layers must be at least 1");
  if (labels.size() != n_classes) {
    throw ValueError("model config: " + std::to_string(labels.size()) + " labels for " + std::to_string(n_classes) +
                     " classes");
  }
  if (vocab_size < enc::Vocabulary::kReserved) throw ValueError("model config: vocab_size is not set");
}

enc::TextEncoderShape ModelConfig::text_shape() const {
  return {vocab_size, max_len, d_model, heads, text_layers, d_model * ffn_mult};
}

enc::ImageEncoderShape ModelConfig::image_shape() const {
  return {image_height, image_width, channels, patch, d_model, heads, vision_layers, d_model * ffn_mult};
}

std::string to_string(ZUpdate z) { return z == ZUpdate::kFrozen ? "frozen" : "self_attention"; }

ZUpdate parse_z_update(const std::string& s) {
  if (s == "self_attention") return ZUpdate::kSelfAttention;
  if (s == "frozen") return ZUpdate::kFrozen;
  throw ValueError("z_update must be 'self_attention' or 'frozen', got '" + s + "'");
}

void to_json(nlohmann::json& j, const ModelConfig& c) {
  j = nlohmann::json{{"vocab_size", c.vocab_size},
                     {"d_model", c.d_model},
                     {"heads", c.heads},
                     {"text_layers", c.text_layers},
                     {"vision_layers", c.vision_layers},
                     {"ffn_mult", c.ffn_mult},
                     {"max_len", c.max_len},
                     {"image_height", c.image_height},
                     {"image_width", c.image_width},
                     {"channels", c.channels},
                     {"patch", c.patch},
                     {"n_classes", c.n_classes},
                     {"n_fusion_layers", c.n_fusion_layers},
                     {"z_update", to_string(c.z_update)},
                     {"fusion_input", c.fusion_input == FusionInput::kConcat ? "concat" : "cross_attention"},
                     {"fusion_stack", c.fusion_stack},
                     {"labels", c.labels}};
}

void from_json(const nlohmann::json& j, ModelConfig& c) {
  ModelConfig d;
  c.vocab_size = j.value("vocab_size", d.vocab_size);
  c.d_model = j.value("d_model", d.d_model);
  c.heads = j.value("heads", d.heads);
  c.text_layers = j.value("text_layers", d.text_layers);
  c.vision_layers = j.value("vision_layers", d.vision_layers);
  c.ffn_mult = j.value("ffn_mult", d.ffn_mult);
  c.max_len = j.value("max_len", d.max_len);
  c.image_height = j.value("image_height", d.image_height);
  c.image_width = j.value("image_width", d.image_width);
  c.channels = j.value("channels", d.channels);
  c.patch = j.value("patch", d.patch);
  c.n_classes = j.value("n_classes", d.n_classes);
  c.n_fusion_layers = j.value("n_fusion_layers", d.n_fusion_layers);
  c.z_update = parse_z_update(j.value("z_update", std::string("self_attention")));
  const std::string input = j.value("fusion_input", std::string("cross_attention"));
  if (input != "cross_attention" && input != "concat") {
    throw ValueError("fusion_input must be 'cross_attention' or 'concat', got '" + input + "'");
  }
  c.fusion_input = input == "concat" ? FusionInput::kConcat : FusionInput::kCrossAttention;
  c.fusion_stack = j.value("fusion_stack", d.fusion_stack);
  c.labels = j.value("labels", default_labels(c.n_classes));
}

}  // namespace aiva::fusion
