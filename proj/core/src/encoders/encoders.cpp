// Copyright 2026 The AIVA Authors
// SPDX-License-Identifier: Apache-2.0

#include "aiva/encoders/encoders.hpp"

#include <cmath>

namespace aiva::enc {

void ImageEncoderShape::validate() const {
  if (patch == 0 || height == 0 || width == 0 || height % patch != 0 || width % patch != 0) {
    throw ValueError("image size H=" + std::to_string(height) + ", W=" + std::to_string(width) +
                     " is not divisible by patch size P=" + std::to_string(patch));
  }
  if (channels == 0) throw ValueError("image channels must be positive");
}

template <typename T>
void TextEncoder<T>::init(const TextEncoderShape& shape, nn::ParamRng& rng) {
  if (shape.vocab_size < Vocabulary::kReserved) throw ValueError("text encoder: vocabulary too small");
  const double stddev = 1.0 / std::sqrt(static_cast<double>(shape.d_model));
  token_embedding = {"text.token_embedding", rng.gaussian<T>({shape.vocab_size, shape.d_model}, stddev), true};
  position = {"text.position", rng.gaussian<T>({shape.max_len, shape.d_model}, stddev), true};
  blocks.resize(shape.layers);
  for (std::size_t i = 0; i < shape.layers; ++i) {
    blocks[i].init("text.block" + std::to_string(i), shape.d_model, shape.heads, shape.ffn_dim, rng);
  }
  final_norm.init("text.final_norm", shape.d_model);
}

template <typename T>
void TextEncoder<T>::collect(nn::ParamList<T>& out) {
  out.push_back(&token_embedding);
  out.push_back(&position);
  for (auto& b : blocks) b.collect(out);
  final_norm.collect(out);
}

template <typename T>
void ImageEncoder<T>::init(const ImageEncoderShape& shape, nn::ParamRng& rng) {
  shape.validate();
  const double stddev = 1.0 / std::sqrt(static_cast<double>(shape.d_model));
  patch = shape.patch;
  patch_projection.init("vision.patch_projection", shape.patch * shape.patch * shape.channels, shape.d_model, rng);
  position = {"vision.position", rng.gaussian<T>({shape.tokens(), shape.d_model}, stddev), true};
  blocks.resize(shape.layers);
  for (std::size_t i = 0; i < shape.layers; ++i) {
    blocks[i].init("vision.block" + std::to_string(i), shape.d_model, shape.heads, shape.ffn_dim, rng);
  }
  final_norm.init("vision.final_norm", shape.d_model);
}

template <typename T>
void ImageEncoder<T>::collect(nn::ParamList<T>& out) {
  patch_projection.collect(out);
  out.push_back(&position);
  for (auto& b : blocks) b.collect(out);
  final_norm.collect(out);
}

template <typename T>
Var<T> encode_text(Graph<T>& g, const TextEncoder<T>& enc, std::span<const std::int32_t> ids,
                   std::span<const std::uint8_t> mask, nn::AttentionTrace<T>* trace) {
  const std::size_t max_len = enc.position.value.rows();
  if (ids.size() != max_len || mask.size() != max_len) {
    throw ShapeError("encode_text: expected " + std::to_string(max_len) + " ids and mask entries, got " +
                     std::to_string(ids.size()) + " and " + std::to_string(mask.size()));
  }
  Var<T> x = num::add(num::embedding(g.param(enc.token_embedding), ids), g.param(enc.position));
  for (const auto& block : enc.blocks) x = nn::encoder_block(g, block, x, mask, trace);
  return nn::layer_norm(g, enc.final_norm, x);
}

template <typename T>
Tensor<T> patchify(const Tensor<T>& image, std::size_t patch) {
  if (image.rank() != 3) throw ShapeError("patchify: expected H×W×C image, got " + num::shape_str(image.shape()));
  const std::size_t h = image.dim(0), w = image.dim(1), c = image.dim(2);
  ImageEncoderShape{h, w, c, patch}.validate();
  const std::size_t gh = h / patch, gw = w / patch, width = patch * patch * c;
  Tensor<T> out(num::Shape{gh * gw, width});
  for (std::size_t py = 0; py < gh; ++py)
    for (std::size_t px = 0; px < gw; ++px) {
      T* row = out.data() + (py * gw + px) * width;
      std::size_t k = 0;
      for (std::size_t y = 0; y < patch; ++y)
        for (std::size_t x = 0; x < patch; ++x)
          for (std::size_t ch = 0; ch < c; ++ch)
            row[k++] = image[((py * patch + y) * w + (px * patch + x)) * c + ch];
    }
  return out;
}

template <typename T>
Var<T> encode_image(Graph<T>& g, const ImageEncoder<T>& enc, const Tensor<T>& image, nn::AttentionTrace<T>* trace) {
  Tensor<T> patches = patchify(image, enc.patch);
  if (patches.rows() != enc.position.value.rows() || patches.cols() != enc.patch_projection.weight.value.rows()) {
    throw ShapeError("encode_image: image " + num::shape_str(image.shape()) + " does not match the encoder's " +
                     std::to_string(enc.position.value.rows()) + " patch tokens");
  }
  Var<T> x = nn::linear(g, enc.patch_projection, g.constant(std::move(patches)));
  x = num::add(x, g.param(enc.position));
  for (const auto& block : enc.blocks) x = nn::encoder_block(g, block, x, {}, trace);
  return nn::layer_norm(g, enc.final_norm, x);
}

#define AIVA_INSTANTIATE_ENCODERS(T)                                                                      \
  template struct TextEncoder<T>;                                                                         \
  template struct ImageEncoder<T>;                                                                        \
  template Var<T> encode_text<T>(Graph<T>&, const TextEncoder<T>&, std::span<const std::int32_t>,         \
                                 std::span<const std::uint8_t>, nn::AttentionTrace<T>*);                  \
  template Tensor<T> patchify<T>(const Tensor<T>&, std::size_t);                                          \
  template Var<T> encode_image<T>(Graph<T>&, const ImageEncoder<T>&, const Tensor<T>&, nn::AttentionTrace<T>*);

AIVA_INSTANTIATE_ENCODERS(float)
AIVA_INSTANTIATE_ENCODERS(double)

#undef AIVA_INSTANTIATE_ENCODERS

}  // namespace aiva::enc
