// Copyright 2026 The AIVA Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "aiva/numerics/tensor.hpp"

namespace aiva::num {

enum class OpKind : std::uint8_t {
  kConstant,
  kInput,
  kParameter,
  kMatMul,
  kAdd,
  kSub,
  kMul,
  kScale,
  kAddScalar,
  kAddBias,
  kTranspose,
  kConcat,
  kSlice,
  kSum,
  kMean,
  kSoftmax,
  kLogSoftmax,
  kLayerNorm,
  kGelu,
  kRelu,
  kL2Normalize,
  kEmbedding,
  kNllFromProbs,
};

std::string_view op_name(OpKind kind);

template <typename T>
class Graph;

/// Handle to a node of a Graph. Cheap to copy; valid while the graph lives.
template <typename T>
class Var {
 public:
  Var() = default;
  Var(Graph<T>* graph, std::size_t id) : graph_(graph), id_(id) {}

  Graph<T>& graph() const { return *graph_; }
  std::size_t id() const noexcept { return id_; }
  const Tensor<T>& value() const;
  const Shape& shape() const { return value().shape(); }
  bool valid() const noexcept { return graph_ != nullptr; }

 private:
  Graph<T>* graph_ = nullptr;
  std::size_t id_ = 0;
};

/// Reverse-mode tape. Nodes are appended in execution order, so every input
/// id precedes its consumer and one reverse sweep visits each node once.
/// A graph is single-owner; build one per forward pass.
template <typename T>
class Graph {
 public:
  using BackwardFn = std::function<void(Graph&, std::size_t self)>;

  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  Var<T> constant(Tensor<T> value);
  Var<T> input(Tensor<T> value, bool requires_grad = true);

  // Parameters are referenced, not copied; the Parameter must outlive the
  // graph. Repeated calls with the same parameter return the same node.
  Var<T> param(const Parameter<T>& p);

  // Appends an op node. `backward` may be empty for non-differentiable ops.
  Var<T> push(OpKind kind, std::vector<std::size_t> inputs, Tensor<T> value, BackwardFn backward);

  void backward(Var<T> loss);

  const Tensor<T>& value(std::size_t id) const;
  // Gradient of the last backward() seed w.r.t. node `id`; nullptr when the
  // node did not receive one.
  const Tensor<T>* grad(std::size_t id) const;
  const Tensor<T>* grad(Var<T> v) const { return grad(v.id()); }
  const Tensor<T>* grad_of(const Parameter<T>& p) const;

  bool needs_grad(std::size_t id) const { return nodes_[id].needs_grad; }
  // Lazily allocated accumulator for an input's gradient, or nullptr when
  // that input does not need one. Only valid inside backward.
  Tensor<T>* grad_sink(std::size_t id);

  OpKind kind(std::size_t id) const { return nodes_[id].kind; }
  const std::vector<std::size_t>& inputs(std::size_t id) const { return nodes_[id].inputs; }
  std::size_t size() const noexcept { return nodes_.size(); }

 private:
  struct Node {
    OpKind kind = OpKind::kConstant;
    std::vector<std::size_t> inputs;
    Tensor<T> owned;
    const Tensor<T>* borrowed = nullptr;
    Tensor<T> grad;
    bool has_grad = false;
    bool needs_grad = false;
    BackwardFn backward;
    const Tensor<T>& value() const { return borrowed ? *borrowed : owned; }
  };

  std::vector<Node> nodes_;
  std::unordered_map<const Parameter<T>*, std::size_t> param_nodes_;
  std::unordered_map<std::size_t, const Parameter<T>*> node_params_;
};

template <typename T>
const Tensor<T>& Var<T>::value() const {
  return graph_->value(id_);
}

}  // namespace aiva::num
