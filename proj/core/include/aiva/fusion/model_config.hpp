// Copyright 2026 The AIVA Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "aiva/encoders/encoders.hpp"

namespace aiva::fusion {

// How the unified representation evolves through the fusion layers.
enum class ZUpdate { kSelfAttention, kFrozen };

// kCrossAttention: bidirectional cross attention; kConcat: plain [T; V].
enum class FusionInput { kCrossAttention, kConcat };

struct ModelConfig {
  std::size_t vocab_size = 0;
  std::size_t d_model = 64;
  std::size_t heads = 4;
  std::size_t text_layers = 2;
  std::size_t vision_layers = 2;
  std::size_t ffn_mult = 2;
  std::size_t max_len = 32;
  std::size_t image_height = 32;
  std::size_t image_width = 32;
  std::size_t channels = 1;
  std::size_t patch = 8;
  std::size_t n_classes = 3;
  std::size_t n_fusion_layers = 3;
  ZUpdate z_update = ZUpdate::kSelfAttention;
  FusionInput fusion_input = FusionInput::kCrossAttention;
  // false: prototypes attend once to Z0 and the fusion stack is skipped.
  bool fusion_stack = true;
  std::vector<std::string> labels;

  void validate() const;
  std::size_t visual_tokens() const { return (image_height / patch) * (image_width / patch); }
  std::size_t fused_tokens() const { return max_len + visual_tokens(); }
  enc::TextEncoderShape text_shape() const;
  enc::ImageEncoderShape image_shape() const;
};

/// positive/neutral/negative for 3 classes, the seven TumEmo emotions for 7,
/// class_<k> otherwise.
std::vector<std::string> default_labels(std::size_t n_classes);

void to_json(nlohmann::json& j, const ModelConfig& c);
void from_json(const nlohmann::json& j, ModelConfig& c);

std::string to_string(ZUpdate z);
ZUpdate parse_z_update(const std::string& s);

}  // namespace aiva::fusion
