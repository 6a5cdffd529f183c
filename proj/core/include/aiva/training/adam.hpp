// Copyright 2026 The AIVA Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "aiva/numerics/tensor.hpp"

namespace aiva::train {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

template <typename T>
struct AdamState {
  AdamConfig config;
  std::vector<num::Tensor<T>> m;  // mirrors the parameter list
  std::vector<num::Tensor<T>> v;
  std::uint64_t step = 0;

  static AdamState zeros(std::span<num::Parameter<T>* const> params, AdamConfig config = {});
};

/// One bias-corrected Adam update:
///   m ← β1·m + (1−β1)·g,  v ← β2·v + (1−β2)·g²
///   p ← p − lr · m̂ / (√v̂ + eps),  m̂ = m/(1−β1ᵗ),  v̂ = v/(1−β2ᵗ)
/// A null gradient counts as zero. Frozen parameters are left untouched.
template <typename T>
void adam_step(std::span<num::Parameter<T>* const> params, std::span<const num::Tensor<T>* const> grads,
               AdamState<T>& state, double lr);

}  // namespace aiva::train
