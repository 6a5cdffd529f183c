// Copyright 2026 The AIVA Authors
// SPDX-License-Identifier: Apache-2.0

#include "aiva/numerics/graph.hpp"

#include <cmath>

namespace aiva::num {

std::string shape_str(const Shape& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += "x";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

std::size_t shape_numel(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

template <typename T>
void check_finite(const Tensor<T>& t, const char* op) {
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!std::isfinite(t[i])) {
      throw NumericError(std::string(op) + ": non-finite value at flat index " + std::to_string(i) +
                         " of output " + shape_str(t.shape()));
    }
  }
}

std::string_view op_name(OpKind kind) {
  switch (kind) {
    case OpKind::kConstant: return "constant";
    case OpKind::kInput: return "input";
    case OpKind::kParameter: return "parameter";
    case OpKind::kMatMul: return "matmul";
    case OpKind::kAdd: return "add";
    case OpKind::kSub: return "sub";
    case OpKind::kMul: return "mul";
    case OpKind::kScale: return "scale";
    case OpKind::kAddScalar: return "add_scalar";
    case OpKind::kAddBias: return "add_bias";
    case OpKind::kTranspose: return "transpose";
    case OpKind::kConcat: return "concat";
    case OpKind::kSlice: return "slice";
    case OpKind::kSum: return "sum";
    case OpKind::kMean: return "mean";
    case OpKind::kSoftmax: return "softmax";
    case OpKind::kLogSoftmax: return "log_softmax";
    case OpKind::kLayerNorm: return "layer_norm";
    case OpKind::kGelu: return "gelu";
    case OpKind::kRelu: return "relu";
    case OpKind::kL2Normalize: return "l2_normalize";
    case OpKind::kEmbedding: return "embedding";
    case OpKind::kNllFromProbs: return "nll_from_probs";
  }
  return "unknown";
}

template <typename T>
Var<T> Graph<T>::constant(Tensor<T> value) {
  check_finite(value, "constant");
  Node n;
  n.kind = OpKind::kConstant;
  n.owned = std::move(value);
  nodes_.push_back(std::move(n));
  return Var<T>(this, nodes_.size() - 1);
}

template <typename T>
Var<T> Graph<T>::input(Tensor<T> value, bool requires_grad) {
  check_finite(value, "input");
  Node n;
  n.kind = OpKind::kInput;
  n.owned = std::move(value);
  n.needs_grad = requires_grad;
  nodes_.push_back(std::move(n));
  return Var<T>(this, nodes_.size() - 1);
}

template <typename T>
Var<T> Graph<T>::param(const Parameter<T>& p) {
  if (auto it = param_nodes_.find(&p); it != param_nodes_.end()) return Var<T>(this, it->second);
  check_finite(p.value, p.name.c_str());
  Node n;
  n.kind = OpKind::kParameter;
  n.borrowed = &p.value;
  n.needs_grad = p.trainable;
  nodes_.push_back(std::move(n));
  const std::size_t id = nodes_.size() - 1;
  param_nodes_.emplace(&p, id);
  node_params_.emplace(id, &p);
  return Var<T>(this, id);
}

template <typename T>
Var<T> Graph<T>::push(OpKind kind, std::vector<std::size_t> inputs, Tensor<T> value, BackwardFn backward) {
  check_finite(value, op_name(kind).data());
  bool needs = false;
  for (std::size_t in : inputs) needs = needs || nodes_[in].needs_grad;
  Node n;
  n.kind = kind;
  n.inputs = std::move(inputs);
  n.owned = std::move(value);
  n.needs_grad = needs && static_cast<bool>(backward);
  if (n.needs_grad) n.backward = std::move(backward);
  nodes_.push_back(std::move(n));
  return Var<T>(this, nodes_.size() - 1);
}

template <typename T>
const Tensor<T>& Graph<T>::value(std::size_t id) const {
  return nodes_.at(id).value();
}

template <typename T>
const Tensor<T>* Graph<T>::grad(std::size_t id) const {
  const Node& n = nodes_.at(id);
  return n.has_grad ? &n.grad : nullptr;
}

template <typename T>
const Tensor<T>* Graph<T>::grad_of(const Parameter<T>& p) const {
  auto it = param_nodes_.find(&p);
  if (it == param_nodes_.end()) return nullptr;
  return grad(it->second);
}

template <typename T>
Tensor<T>* Graph<T>::grad_sink(std::size_t id) {
  Node& n = nodes_[id];
  if (!n.needs_grad) return nullptr;
  if (!n.has_grad) {
    n.grad = Tensor<T>(n.value().shape());
    n.has_grad = true;
  }
  return &n.grad;
}

template <typename T>
void Graph<T>::backward(Var<T> loss) {
  if (loss.valid() && &loss.graph() != this) throw ValueError("backward: loss belongs to another graph");
  const std::size_t seed = loss.id();
  if (seed >= nodes_.size()) throw ValueError("backward: loss is not a node of this graph");
  if (nodes_[seed].value().size() != 1) {
    throw ShapeError("backward: seed must be scalar, got shape " + shape_str(nodes_[seed].value().shape()));
  }
  for (Node& n : nodes_) {
    n.has_grad = false;
    n.grad = Tensor<T>{};
  }
  if (!nodes_[seed].needs_grad) return;
  *grad_sink(seed) = Tensor<T>(nodes_[seed].value().shape(), T{1});

  for (std::size_t i = seed + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.has_grad || !n.backward) continue;
    n.backward(*this, i);
  }
  for (const auto& [id, p] : node_params_) {
    if (nodes_[id].has_grad) check_finite(nodes_[id].grad, p->name.c_str());
  }
}

template void check_finite<float>(const Tensor<float>&, const char*);
template void check_finite<double>(const Tensor<double>&, const char*);
template class Graph<float>;
template class Graph<double>;

}  // namespace aiva::num
