// Copyright 2026 The AIVA Authors
// SPDX-License-Identifier: Apache-2.0

#include "aiva/training/adam.hpp"

#include <cmath>
#include <string>

#include "aiva/error.hpp"

namespace aiva::train {

template <typename T>
AdamState<T> AdamState<T>::zeros(std::span<num::Parameter<T>* const> params, AdamConfig config) {
  AdamState<T> s;
  s.config = config;
  for (const num::Parameter<T>* p : params) {
    s.m.emplace_back(p->value.shape(), T{0});
    s.v.emplace_back(p->value.shape(), T{0});
  }
  return s;
}

template <typename T>
void adam_step(std::span<num::Parameter<T>* const> params, std::span<const num::Tensor<T>* const> grads,
               AdamState<T>& state, double lr) {
  if (!(lr >= 0.0) || !std::isfinite(lr)) throw ValueError("learning rate must be nonnegative, got " + std::to_string(lr));
  if (grads.size() != params.size() || state.m.size() != params.size() || state.v.size() != params.size()) {
    throw ShapeError("adam_step: " + std::to_string(params.size()) + " parameters, " + std::to_string(grads.size()) +
                     " gradients, " + std::to_string(state.m.size()) + " moment slots");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& shape = params[i]->value.shape();
    if (state.m[i].shape() != shape || state.v[i].shape() != shape || (grads[i] && grads[i]->shape() != shape)) {
      throw ShapeError("adam_step: shape mismatch for " + params[i]->name + " " + num::shape_str(shape));
    }
  }

  ++state.step;
  const AdamConfig& c = state.config;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(c.beta1, t);
  const double correction2 = 1.0 - std::pow(c.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    num::Parameter<T>& p = *params[i];
    if (!p.trainable) continue;
    T* w = p.value.data();
    T* m = state.m[i].data();
    T* v = state.v[i].data();
    const T* g = grads[i] ? grads[i]->data() : nullptr;
    for (std::size_t k = 0; k < p.value.size(); ++k) {
      const double gk = g ? static_cast<double>(g[k]) : 0.0;
      const double mk = c.beta1 * static_cast<double>(m[k]) + (1.0 - c.beta1) * gk;
      const double vk = c.beta2 * static_cast<double>(v[k]) + (1.0 - c.beta2) * gk * gk;
      m[k] = static_cast<T>(mk);
      v[k] = static_cast<T>(vk);
      const double update = lr * (mk / correction1) / (std::sqrt(vk / correction2) + c.eps);
      w[k] = static_cast<T>(static_cast<double>(w[k]) - update);
    }
  }
}

template struct AdamState<float>;
template struct AdamState<double>;
template void adam_step<float>(std::span<num::Parameter<float>* const>, std::span<const num::Tensor<float>* const>,
                               AdamState<float>&, double);
template void adam_step<double>(std::span<num::Parameter<double>* const>, std::span<const num::Tensor<double>* const>,
                                AdamState<double>&, double);

}  // namespace aiva::train
