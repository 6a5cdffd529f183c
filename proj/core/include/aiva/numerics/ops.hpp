// Copyright 2026 The AIVA Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <type_traits>
#include <vector>

#include "aiva/numerics/graph.hpp"

// Differentiable ops over Graph variables. Every op validates shapes up
// front and checks its output for NaN/Inf. There is no implicit
// broadcasting; add_bias is the only op that combines different shapes.
namespace aiva::num {

template <typename T> Var<T> matmul(Var<T> a, Var<T> b);
template <typename T> Var<T> add(Var<T> a, Var<T> b);
template <typename T> Var<T> sub(Var<T> a, Var<T> b);
template <typename T> Var<T> mul(Var<T> a, Var<T> b);
template <typename T> Var<T> scale(Var<T> a, std::type_identity_t<T> factor);
template <typename T> Var<T> add_scalar(Var<T> a, std::type_identity_t<T> offset);

// x[m×n] + b, where b has shape [n] or [1×n] and is added to every row.
template <typename T> Var<T> add_bias(Var<T> x, Var<T> b);

template <typename T> Var<T> transpose(Var<T> a);
template <typename T> Var<T> concat(std::span<const Var<T>> parts, std::size_t axis);
template <typename T>
Var<T> concat(const std::vector<Var<T>>& parts, std::size_t axis) {
  return concat<T>(std::span<const Var<T>>(parts), axis);
}
template <typename T> Var<T> slice(Var<T> a, std::size_t axis, std::size_t start, std::size_t length);

// Sum of all entries, shape {1}.
template <typename T> Var<T> sum(Var<T> a);
// Mean along `axis`; the axis is kept with extent 1.
template <typename T> Var<T> mean(Var<T> a, std::size_t axis);

template <typename T> Var<T> softmax(Var<T> x, std::size_t axis);
template <typename T> Var<T> log_softmax(Var<T> x, std::size_t axis);

// Normalizes over the last axis, then applies gain and bias of shape [n].
template <typename T>
Var<T> layer_norm(Var<T> x, Var<T> gain, Var<T> bias, std::type_identity_t<T> eps = T(1e-5));

template <typename T> Var<T> gelu(Var<T> x);
template <typename T> Var<T> relu(Var<T> x);

// Scales every slice along the last axis to unit L2 norm. A zero slice is a
// NumericError.
template <typename T> Var<T> l2_normalize(Var<T> x);

// Gathers rows of table[V×d]; result is [ids.size()×d].
template <typename T> Var<T> embedding(Var<T> table, std::span<const std::int32_t> ids);

// -sum_i log(max(p[i, labels[i]], 1e-12)) over rows of p[N×C].
template <typename T> Var<T> nll_from_probs(Var<T> probs, std::span<const std::int32_t> labels);

// Tensor-level convenience (no graph).
template <typename T> Tensor<T> softmax(const Tensor<T>& x, std::size_t axis);
template <typename T> Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b);

}  // namespace aiva::num
