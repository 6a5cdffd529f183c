// Copyright 2026 The AIVA Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "aiva/numerics/graph.hpp"
#include "aiva/numerics/ops.hpp"

// Parameter containers and forward functions shared by the encoders and the
// fusion stack. Weights use the row convention: y = x · W.
namespace aiva::nn {

using num::Graph;
using num::Parameter;
using num::Shape;
using num::Tensor;
using num::Var;

/// Seeded source of initial weights. Draw order is part of the model
/// definition: the same seed and construction order give identical models.
class ParamRng {
 public:
  explicit ParamRng(std::uint64_t seed) : engine_(seed) {}

  template <typename T>
  Tensor<T> gaussian(const Shape& shape, double stddev) {
    Tensor<T> t(shape);
    std::normal_distribution<double> dist(0.0, stddev);
    for (auto& v : t.values()) v = static_cast<T>(dist(engine_));
    return t;
  }

 private:
  std::mt19937_64 engine_;
};

template <typename T>
using ParamList = std::vector<Parameter<T>*>;

template <typename T>
struct Linear {
  Parameter<T> weight;  // [in × out]
  Parameter<T> bias;    // [out]

  void init(const std::string& name, std::size_t in, std::size_t out, ParamRng& rng);
  void collect(ParamList<T>& out);
};

template <typename T>
struct LayerNorm {
  Parameter<T> gain;
  Parameter<T> bias;

  void init(const std::string& name, std::size_t n);
  void collect(ParamList<T>& out);
};

/// Query/key/value projections [d × d] split across `heads` heads of
/// width d / heads.
template <typename T>
struct AttentionParams {
  Parameter<T> wq;
  Parameter<T> wk;
  Parameter<T> wv;
  std::size_t heads = 1;

  void init(const std::string& name, std::size_t d, std::size_t heads, ParamRng& rng);
  void collect(ParamList<T>& out);
  std::size_t head_dim() const { return wq.value.cols() / heads; }
};

/// Pre-norm transformer encoder block: x + Wo·MHA(LN(x)), then x + FFN(LN(x)).
template <typename T>
struct EncoderBlock {
  LayerNorm<T> ln_attn;
  AttentionParams<T> attn;
  Parameter<T> wo;
  LayerNorm<T> ln_ffn;
  Linear<T> ffn_in;
  Linear<T> ffn_out;

  void init(const std::string& name, std::size_t d, std::size_t heads, std::size_t ffn_dim, ParamRng& rng);
  void collect(ParamList<T>& out);
};

// 1 = position may be attended to. An empty mask means every key is valid.
using KeyMask = std::span<const std::uint8_t>;

template <typename T>
using AttentionTrace = std::vector<Tensor<T>>;

template <typename T>
struct AttentionOutput {
  Var<T> output;                 // [n_q × d], heads re-concatenated
  std::vector<Var<T>> weights;   // one [n_q × n_k] row-stochastic matrix per head
};

template <typename T>
AttentionOutput<T> multi_head_attention(Graph<T>& g, const AttentionParams<T>& p, Var<T> queries,
                                        Var<T> keys_values, KeyMask key_mask, AttentionTrace<T>* trace = nullptr);

template <typename T>
Var<T> linear(Graph<T>& g, const Linear<T>& p, Var<T> x);

template <typename T>
Var<T> layer_norm(Graph<T>& g, const LayerNorm<T>& p, Var<T> x);

template <typename T>
Var<T> encoder_block(Graph<T>& g, const EncoderBlock<T>& p, Var<T> x, KeyMask mask,
                     AttentionTrace<T>* trace = nullptr);

}  // namespace aiva::nn
