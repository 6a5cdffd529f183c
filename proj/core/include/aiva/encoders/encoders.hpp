// Copyright 2026 The AIVA Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "aiva/encoders/vocabulary.hpp"
#include "aiva/nn/layers.hpp"

// Small trainable text and image encoders that map both modalities into
// token sequences of the shared model dimension.
namespace aiva::enc {

using num::Graph;
using num::Parameter;
using num::Tensor;
using num::Var;

struct TextEncoderShape {
  std::size_t vocab_size = 0;
  std::size_t max_len = 32;
  std::size_t d_model = 64;
  std::size_t heads = 4;
  std::size_t layers = 2;
  std::size_t ffn_dim = 128;
};

struct ImageEncoderShape {
  std::size_t height = 32;
  std::size_t width = 32;
  std::size_t channels = 1;
  std::size_t patch = 8;
  std::size_t d_model = 64;
  std::size_t heads = 4;
  std::size_t layers = 2;
  std::size_t ffn_dim = 128;

  // Throws ValueError naming H, W and P when the grid does not tile.
  void validate() const;
  std::size_t tokens() const { return (height / patch) * (width / patch); }
};

template <typename T>
struct TextEncoder {
  Parameter<T> token_embedding;  // [vocab × d]
  Parameter<T> position;         // [max_len × d]
  std::vector<nn::EncoderBlock<T>> blocks;
  nn::LayerNorm<T> final_norm;

  void init(const TextEncoderShape& shape, nn::ParamRng& rng);
  void collect(nn::ParamList<T>& out);
};

template <typename T>
struct ImageEncoder {
  nn::Linear<T> patch_projection;  // [P·P·C × d]
  Parameter<T> position;           // [M × d]
  std::vector<nn::EncoderBlock<T>> blocks;
  nn::LayerNorm<T> final_norm;
  std::size_t patch = 8;

  void init(const ImageEncoderShape& shape, nn::ParamRng& rng);
  void collect(nn::ParamList<T>& out);
};

/// Embedding + position + encoder blocks; padded positions are never
/// attended to. Output is [max_len × d].
template <typename T>
Var<T> encode_text(Graph<T>& g, const TextEncoder<T>& enc, std::span<const std::int32_t> ids,
                   std::span<const std::uint8_t> mask, nn::AttentionTrace<T>* trace = nullptr);

/// Splits an H×W×C image (row-major, channels last) into non-overlapping
/// P×P patches, one flattened row per patch in raster order.
template <typename T>
Tensor<T> patchify(const Tensor<T>& image, std::size_t patch);

/// Patch projection + position + encoder blocks. Output is [M × d].
template <typename T>
Var<T> encode_image(Graph<T>& g, const ImageEncoder<T>& enc, const Tensor<T>& image,
                    nn::AttentionTrace<T>* trace = nullptr);

}  // namespace aiva::enc
