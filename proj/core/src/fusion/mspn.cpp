// Copyright 2026 The AIVA Authors
// SPDX-License-Identifier: Apache-2.0

#include "aiva/fusion/mspn.hpp"

#include <algorithm>
#include <cmath>

namespace aiva::fusion {
namespace {

constexpr std::uint64_t kPrototypeSeedSalt = 0x9e3779b97f4a7c15ULL;

}  // namespace

template <typename T>
void FusionLayerParams<T>::init(const std::string& name, const ModelConfig& cfg, nn::ParamRng& rng) {
  z_block.init(name + ".z_block", cfg.d_model, cfg.heads, cfg.d_model * cfg.ffn_mult, rng);
  prototype.init(name + ".prototype_attn", cfg.d_model, cfg.heads, rng);
}

template <typename T>
void FusionLayerParams<T>::collect(nn::ParamList<T>& out) {
  z_block.collect(out);
  prototype.collect(out);
}

template <typename T>
nn::ParamList<T> MspnParams<T>::collect() {
  nn::ParamList<T> out;
  text.collect(out);
  vision.collect(out);
  caf_text.collect(out);
  caf_visual.collect(out);
  for (auto& layer : layers) layer.collect(out);
  out.push_back(&prototypes);
  classifier_hidden.collect(out);
  classifier_out.collect(out);
  return out;
}

template <typename T>
Tensor<T> init_prototypes(std::size_t n_classes, std::size_t d, std::uint64_t seed) {
  if (n_classes < 2) throw ValueError("init_prototypes: need at least 2 classes");
  if (d == 0) throw ValueError("init_prototypes: dimension must be positive");
  nn::ParamRng rng(seed);
  return rng.gaussian<T>({n_classes, d}, 1.0 / std::sqrt(static_cast<double>(d)));
}

template <typename T>
CafOutput<T> cross_attention_fuse(Graph<T>& g, const nn::AttentionParams<T>& text_params,
                                  const nn::AttentionParams<T>& visual_params, Var<T> text, Var<T> visual,
                                  std::span<const std::uint8_t> text_mask, nn::AttentionTrace<T>* trace) {
  if (text.shape().size() != 2 || visual.shape().size() != 2 || text.shape()[1] != visual.shape()[1]) {
    throw ShapeError("cross_attention_fuse: text " + num::shape_str(text.shape()) + " and visual " +
                     num::shape_str(visual.shape()) + " are not in a shared model dimension");
  }
  const std::size_t l = text.shape()[0];
  const std::size_t m = visual.shape()[0];
  auto t_hat = nn::multi_head_attention(g, text_params, visual, text, text_mask, trace);
  auto v_hat = nn::multi_head_attention(g, visual_params, text, visual, {}, trace);

  CafOutput<T> out;
  out.t_hat = t_hat.output;
  out.v_hat = v_hat.output;
  out.z0 = num::concat(std::vector<Var<T>>{out.t_hat, out.v_hat}, 0);
  out.z_mask.assign(m, 1);
  if (text_mask.empty()) {
    out.z_mask.resize(m + l, 1);
  } else {
    out.z_mask.insert(out.z_mask.end(), text_mask.begin(), text_mask.end());
  }
  out.weights = t_hat.weights;
  out.weights.insert(out.weights.end(), v_hat.weights.begin(), v_hat.weights.end());
  return out;
}

template <typename T>
FusedState<T> fusion_layer(Graph<T>& g, const FusionLayerParams<T>& p, const FusedState<T>& prev, ZUpdate z_update,
                           std::span<const std::uint8_t> z_mask, nn::AttentionTrace<T>* trace) {
  FusedState<T> next;
  next.layer = prev.layer + 1;
  next.z = z_update == ZUpdate::kSelfAttention ? nn::encoder_block(g, p.z_block, prev.z, z_mask, trace) : prev.z;
  Var<T> attended = nn::multi_head_attention(g, p.prototype, prev.s, next.z, z_mask, trace).output;
  next.s = num::add(attended, prev.s);
  return next;
}

template <typename T>
Var<T> classify_prototypes(Graph<T>& g, const MspnParams<T>& p, Var<T> prototypes) {
  Var<T> hidden = num::gelu(nn::linear(g, p.classifier_hidden, prototypes));
  return num::transpose(nn::linear(g, p.classifier_out, hidden));
}

template <typename T>
Mspn<T>::Mspn(ModelConfig config, std::uint64_t seed) : config_(std::move(config)) {
  config_.validate();
  nn::ParamRng rng(seed);
  params_.text.init(config_.text_shape(), rng);
  params_.vision.init(config_.image_shape(), rng);
  params_.caf_text.init("caf.text", config_.d_model, config_.heads, rng);
  params_.caf_visual.init("caf.visual", config_.d_model, config_.heads, rng);
  params_.layers.resize(config_.n_fusion_layers);
  for (std::size_t j = 0; j < config_.n_fusion_layers; ++j) {
    params_.layers[j].init("fusion.layer" + std::to_string(j), config_, rng);
  }
  params_.prototypes = {"prototypes", init_prototypes<T>(config_.n_classes, config_.d_model, seed ^ kPrototypeSeedSalt),
                        true};
  params_.classifier_hidden.init("classifier.hidden", config_.d_model, config_.d_model / 2, rng);
  params_.classifier_out.init("classifier.out", config_.d_model / 2, 1, rng);
}

template <typename T>
std::vector<const Parameter<T>*> Mspn<T>::parameters() const {
  auto list = const_cast<MspnParams<T>&>(params_).collect();
  return {list.begin(), list.end()};
}

template <typename T>
void Mspn<T>::set_encoders_trainable(bool trainable) {
  nn::ParamList<T> list;
  params_.text.collect(list);
  params_.vision.collect(list);
  for (auto* p : list) p->trainable = trainable;
}

template <typename T>
MspnOutput<T> Mspn<T>::forward(Graph<T>& g, const ModelInput<T>& input, nn::AttentionTrace<T>* trace) const {
  MspnOutput<T> out;
  const auto& mask = input.tokens.mask;
  out.text_tokens = enc::encode_text(g, params_.text, input.tokens.ids, mask, trace);
  out.visual_tokens = enc::encode_image(g, params_.vision, input.image, trace);

  if (config_.fusion_input == FusionInput::kCrossAttention) {
    auto caf = cross_attention_fuse(g, params_.caf_text, params_.caf_visual, out.text_tokens, out.visual_tokens, mask,
                                    trace);
    out.z0 = caf.z0;
    out.z_mask = std::move(caf.z_mask);
  } else {
    out.z0 = num::concat(std::vector<Var<T>>{out.text_tokens, out.visual_tokens}, 0);
    out.z_mask = mask;
    out.z_mask.resize(mask.size() + config_.visual_tokens(), 1);
  }

  FusedState<T> state{out.z0, g.param(params_.prototypes), 0};
  out.states.push_back(state);
  if (config_.fusion_stack) {
    for (const auto& layer : params_.layers) {
      state = fusion_layer(g, layer, state, config_.z_update, out.z_mask, trace);
      out.states.push_back(state);
    }
  } else {
    state = fusion_layer(g, params_.layers.front(), state, ZUpdate::kFrozen, out.z_mask, trace);
    out.states.push_back(state);
  }
  out.z_final = state.z;
  out.s_final = state.s;
  out.logits = classify_prototypes(g, params_, state.s);
  out.probs = num::softmax(out.logits, 1);
  return out;
}

template <typename T>
Prediction Mspn<T>::predict(const ModelInput<T>& input) const {
  Graph<T> g;
  MspnOutput<T> out = forward(g, input);
  Prediction p;
  const Tensor<T>& logits = out.logits.value();
  const Tensor<T>& probs = out.probs.value();
  for (std::size_t c = 0; c < logits.size(); ++c) {
    p.logits.push_back(static_cast<double>(logits[c]));
    p.probabilities.push_back(static_cast<double>(probs[c]));
  }
  p.label = static_cast<std::int32_t>(std::max_element(p.probabilities.begin(), p.probabilities.end()) -
                                      p.probabilities.begin());
  return p;
}

template <typename To, typename From>
Mspn<To> convert(const Mspn<From>& model) {
  Mspn<To> out(model.config(), 0);
  auto dst = out.parameters();
  auto src = model.parameters();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    dst[i]->value = src[i]->value.template cast<To>();
    dst[i]->trainable = src[i]->trainable;
  }
  return out;
}

#define AIVA_INSTANTIATE_MSPN(T)                                                                                   \
  template struct FusionLayerParams<T>;                                                                            \
  template struct MspnParams<T>;                                                                                   \
  template class Mspn<T>;                                                                                          \
  template Tensor<T> init_prototypes<T>(std::size_t, std::size_t, std::uint64_t);                                  \
  template CafOutput<T> cross_attention_fuse<T>(Graph<T>&, const nn::AttentionParams<T>&,                          \
                                                const nn::AttentionParams<T>&, Var<T>, Var<T>,                     \
                                                std::span<const std::uint8_t>, nn::AttentionTrace<T>*);            \
  template FusedState<T> fusion_layer<T>(Graph<T>&, const FusionLayerParams<T>&, const FusedState<T>&, ZUpdate,    \
                                         std::span<const std::uint8_t>, nn::AttentionTrace<T>*);                   \
  template Var<T> classify_prototypes<T>(Graph<T>&, const MspnParams<T>&, Var<T>);

AIVA_INSTANTIATE_MSPN(float)
AIVA_INSTANTIATE_MSPN(double)

template Mspn<double> convert<double, float>(const Mspn<float>&);
template Mspn<float> convert<float, double>(const Mspn<double>&);
template Mspn<float> convert<float, float>(const Mspn<float>&);
template Mspn<double> convert<double, double>(const Mspn<double>&);

#undef AIVA_INSTANTIATE_MSPN

}  // namespace aiva::fusion
