// Copyright 2026 The AIVA Authors
// SPDX-License-Identifier: Apache-2.0

#include "aiva/nn/layers.hpp"

#include <algorithm>
#include <cmath>

namespace aiva::nn {
namespace {

// Additive score mask; exp of this offset underflows to exactly zero.
constexpr double kMaskedScore = -1e9;

}  // namespace

template <typename T>
void Linear<T>::init(const std::string& name, std::size_t in, std::size_t out, ParamRng& rng) {
  weight = {name + ".weight", rng.gaussian<T>({in, out}, 1.0 / std::sqrt(static_cast<double>(in))), true};
  bias = {name + ".bias", Tensor<T>(Shape{out}), true};
}

template <typename T>
void Linear<T>::collect(ParamList<T>& out) {
  out.push_back(&weight);
  out.push_back(&bias);
}

template <typename T>
void LayerNorm<T>::init(const std::string& name, std::size_t n) {
  gain = {name + ".gain", Tensor<T>(Shape{n}, T{1}), true};
  bias = {name + ".bias", Tensor<T>(Shape{n}), true};
}

template <typename T>
void LayerNorm<T>::collect(ParamList<T>& out) {
  out.push_back(&gain);
  out.push_back(&bias);
}

template <typename T>
void AttentionParams<T>::init(const std::string& name, std::size_t d, std::size_t n_heads, ParamRng& rng) {
  if (n_heads == 0 || d % n_heads != 0) {
    throw ValueError(name + ": model dimension " + std::to_string(d) + " is not divisible by " +
                     std::to_string(n_heads) + " heads");
  }
  const double stddev = 1.0 / std::sqrt(static_cast<double>(d));
  wq = {name + ".wq", rng.gaussian<T>({d, d}, stddev), true};
  wk = {name + ".wk", rng.gaussian<T>({d, d}, stddev), true};
  wv = {name + ".wv", rng.gaussian<T>({d, d}, stddev), true};
  heads = n_heads;
}

template <typename T>
void AttentionParams<T>::collect(ParamList<T>& out) {
  out.push_back(&wq);
  out.push_back(&wk);
  out.push_back(&wv);
}

template <typename T>
void EncoderBlock<T>::init(const std::string& name, std::size_t d, std::size_t heads, std::size_t ffn_dim,
                           ParamRng& rng) {
  ln_attn.init(name + ".ln_attn", d);
  attn.init(name + ".attn", d, heads, rng);
  wo = {name + ".attn.wo", rng.gaussian<T>({d, d}, 1.0 / std::sqrt(static_cast<double>(d))), true};
  ln_ffn.init(name + ".ln_ffn", d);
  ffn_in.init(name + ".ffn_in", d, ffn_dim, rng);
  ffn_out.init(name + ".ffn_out", ffn_dim, d, rng);
}

template <typename T>
void EncoderBlock<T>::collect(ParamList<T>& out) {
  ln_attn.collect(out);
  attn.collect(out);
  out.push_back(&wo);
  ln_ffn.collect(out);
  ffn_in.collect(out);
  ffn_out.collect(out);
}

template <typename T>
AttentionOutput<T> multi_head_attention(Graph<T>& g, const AttentionParams<T>& p, Var<T> queries,
                                        Var<T> keys_values, KeyMask key_mask, AttentionTrace<T>* trace) {
  const std::size_t d = p.wq.value.rows();
  if (queries.shape().size() != 2 || keys_values.shape().size() != 2 || queries.shape()[1] != d ||
      keys_values.shape()[1] != d) {
    throw ShapeError("attention: inputs " + num::shape_str(queries.shape()) + " and " +
                     num::shape_str(keys_values.shape()) + " are not in model dimension " + std::to_string(d));
  }
  const std::size_t n_q = queries.shape()[0];
  const std::size_t n_k = keys_values.shape()[0];
  if (!key_mask.empty() && key_mask.size() != n_k) {
    throw ShapeError("attention: key mask of length " + std::to_string(key_mask.size()) + " for " +
                     std::to_string(n_k) + " keys");
  }

  Var<T> q = num::matmul(queries, g.param(p.wq));
  Var<T> k = num::matmul(keys_values, g.param(p.wk));
  Var<T> v = num::matmul(keys_values, g.param(p.wv));

  Var<T> mask_offsets;
  if (std::find(key_mask.begin(), key_mask.end(), std::uint8_t{0}) != key_mask.end()) {
    Tensor<T> offsets(Shape{n_q, n_k});
    for (std::size_t r = 0; r < n_q; ++r)
      for (std::size_t c = 0; c < n_k; ++c)
        if (!key_mask[c]) offsets.at(r, c) = static_cast<T>(kMaskedScore);
    mask_offsets = g.constant(std::move(offsets));
  }

  const std::size_t dk = p.head_dim();
  const T inv_sqrt_dk = static_cast<T>(1.0 / std::sqrt(static_cast<double>(dk)));
  AttentionOutput<T> result;
  std::vector<Var<T>> head_outputs;
  for (std::size_t h = 0; h < p.heads; ++h) {
    Var<T> qh = p.heads == 1 ? q : num::slice(q, 1, h * dk, dk);
    Var<T> kh = p.heads == 1 ? k : num::slice(k, 1, h * dk, dk);
    Var<T> vh = p.heads == 1 ? v : num::slice(v, 1, h * dk, dk);
    Var<T> scores = num::scale(num::matmul(qh, num::transpose(kh)), inv_sqrt_dk);
    if (mask_offsets.valid()) scores = num::add(scores, mask_offsets);
    Var<T> weights = num::softmax(scores, 1);
    if (trace) trace->push_back(weights.value());
    result.weights.push_back(weights);
    head_outputs.push_back(num::matmul(weights, vh));
  }
  result.output = p.heads == 1 ? head_outputs.front() : num::concat(head_outputs, 1);
  return result;
}

template <typename T>
Var<T> linear(Graph<T>& g, const Linear<T>& p, Var<T> x) {
  return num::add_bias(num::matmul(x, g.param(p.weight)), g.param(p.bias));
}

template <typename T>
Var<T> layer_norm(Graph<T>& g, const LayerNorm<T>& p, Var<T> x) {
  return num::layer_norm(x, g.param(p.gain), g.param(p.bias));
}

template <typename T>
Var<T> encoder_block(Graph<T>& g, const EncoderBlock<T>& p, Var<T> x, KeyMask mask, AttentionTrace<T>* trace) {
  Var<T> h = layer_norm(g, p.ln_attn, x);
  Var<T> attended = multi_head_attention(g, p.attn, h, h, mask, trace).output;
  x = num::add(x, num::matmul(attended, g.param(p.wo)));
  h = layer_norm(g, p.ln_ffn, x);
  Var<T> ffn = linear(g, p.ffn_out, num::gelu(linear(g, p.ffn_in, h)));
  return num::add(x, ffn);
}

#define AIVA_INSTANTIATE_LAYERS(T)                                                                         \
  template struct Linear<T>;                                                                               \
  template struct LayerNorm<T>;                                                                            \
  template struct AttentionParams<T>;                                                                      \
  template struct EncoderBlock<T>;                                                                         \
  template AttentionOutput<T> multi_head_attention<T>(Graph<T>&, const AttentionParams<T>&, Var<T>, Var<T>, \
                                                      KeyMask, AttentionTrace<T>*);                        \
  template Var<T> linear<T>(Graph<T>&, const Linear<T>&, Var<T>);                                          \
  template Var<T> layer_norm<T>(Graph<T>&, const LayerNorm<T>&, Var<T>);                                   \
  template Var<T> encoder_block<T>(Graph<T>&, const EncoderBlock<T>&, Var<T>, KeyMask, AttentionTrace<T>*);

AIVA_INSTANTIATE_LAYERS(float)
AIVA_INSTANTIATE_LAYERS(double)

#undef AIVA_INSTANTIATE_LAYERS

}  // namespace aiva::nn
