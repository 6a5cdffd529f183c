// Copyright 2026 The AIVA Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "aiva/encoders/encoders.hpp"
#include "aiva/fusion/model_config.hpp"
#include "aiva/nn/layers.hpp"

// Multimodal sentiment perception network: cross-attention fusion of text
// and visual tokens, learnable sentiment prototypes refined by a stack of
// fusion layers, and a per-prototype classifier.
namespace aiva::fusion {

using num::Graph;
using num::Parameter;
using num::Tensor;
using num::Var;

template <typename T>
struct FusionLayerParams {
  nn::EncoderBlock<T> z_block;        // Z_{j-1} -> Z_j
  nn::AttentionParams<T> prototype;   // S_{j-1} attends to Z_j

  void init(const std::string& name, const ModelConfig& cfg, nn::ParamRng& rng);
  void collect(nn::ParamList<T>& out);
};

template <typename T>
struct MspnParams {
  enc::TextEncoder<T> text;
  enc::ImageEncoder<T> vision;
  nn::AttentionParams<T> caf_text;    // visual queries over text tokens -> T_hat
  nn::AttentionParams<T> caf_visual;  // text queries over visual tokens -> V_hat
  std::vector<FusionLayerParams<T>> layers;
  Parameter<T> prototypes;            // S_0, [C × d]
  nn::Linear<T> classifier_hidden;    // d -> d/2
  nn::Linear<T> classifier_out;       // d/2 -> 1

  // Fixed order; checkpoints and optimizers rely on it.
  nn::ParamList<T> collect();
};

/// One image-text pair ready for the model. `image` is H×W×C in [0, 1].
template <typename T>
struct ModelInput {
  enc::TokenSequence tokens;
  Tensor<T> image;
};

template <typename T>
struct CafOutput {
  Var<T> t_hat;                      // [M × d]: text values gathered by visual queries
  Var<T> v_hat;                      // [L × d]: visual values gathered by text queries
  Var<T> z0;                         // [(L+M) × d] = [T_hat ; V_hat]
  std::vector<std::uint8_t> z_mask;  // valid rows of z0
  std::vector<Var<T>> weights;       // per-head attention matrices, both directions
};

template <typename T>
struct FusedState {
  Var<T> z;  // [(L+M) × d]
  Var<T> s;  // [C × d]
  std::size_t layer = 0;
};

template <typename T>
struct MspnOutput {
  Var<T> text_tokens;    // T, [L × d]
  Var<T> visual_tokens;  // V, [M × d]
  Var<T> z0;
  std::vector<std::uint8_t> z_mask;
  std::vector<FusedState<T>> states;  // S_0/Z_0 through the final layer
  Var<T> z_final;
  Var<T> s_final;
  Var<T> logits;  // [1 × C]
  Var<T> probs;   // [1 × C]
};

struct Prediction {
  std::vector<double> probabilities;
  std::vector<double> logits;
  std::int32_t label = 0;
};

/// Bidirectional cross attention. T_hat = softmax(Q(V)·K(T)ᵀ/√d_k)·V(T) and
/// V_hat symmetrically; Z0 stacks them row-wise. Text padding is excluded
/// both as keys and (through z_mask) downstream.
template <typename T>
CafOutput<T> cross_attention_fuse(Graph<T>& g, const nn::AttentionParams<T>& text_params,
                                  const nn::AttentionParams<T>& visual_params, Var<T> text, Var<T> visual,
                                  std::span<const std::uint8_t> text_mask, nn::AttentionTrace<T>* trace = nullptr);

/// One fusion layer: Z_j from Z_{j-1} (per `z_update`), then
/// S_j = softmax(Q(S_{j-1})·K(Z_j)ᵀ/√d_k)·V(Z_j) + S_{j-1}.
template <typename T>
FusedState<T> fusion_layer(Graph<T>& g, const FusionLayerParams<T>& p, const FusedState<T>& prev, ZUpdate z_update,
                           std::span<const std::uint8_t> z_mask, nn::AttentionTrace<T>* trace = nullptr);

/// Shared per-row MLP over the prototype rows, one logit per class: [1 × C].
template <typename T>
Var<T> classify_prototypes(Graph<T>& g, const MspnParams<T>& p, Var<T> prototypes);

/// Gaussian rows with std 1/√d, deterministic per seed.
template <typename T>
Tensor<T> init_prototypes(std::size_t n_classes, std::size_t d, std::uint64_t seed);

template <typename T>
class Mspn {
 public:
  Mspn(ModelConfig config, std::uint64_t seed);

  Mspn(const Mspn&) = default;
  Mspn& operator=(const Mspn&) = default;

  const ModelConfig& config() const noexcept { return config_; }
  MspnParams<T>& params() noexcept { return params_; }
  const MspnParams<T>& params() const noexcept { return params_; }
  nn::ParamList<T> parameters() { return params_.collect(); }
  std::vector<const Parameter<T>*> parameters() const;

  MspnOutput<T> forward(Graph<T>& g, const ModelInput<T>& input, nn::AttentionTrace<T>* trace = nullptr) const;
  Prediction predict(const ModelInput<T>& input) const;

  void set_encoders_trainable(bool trainable);

 private:
  ModelConfig config_;
  MspnParams<T> params_;
};

/// Copies every parameter into a model of another precision.
template <typename To, typename From>
Mspn<To> convert(const Mspn<From>& model);

}  // namespace aiva::fusion
