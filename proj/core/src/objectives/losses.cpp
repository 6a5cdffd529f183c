// Copyright 2026 The AIVA Authors
// SPDX-License-Identifier: Apache-2.0

#include "aiva/objectives/losses.hpp"

#include <cmath>
#include <vector>

namespace aiva::obj {
namespace {

void check_labels(std::span<const std::int32_t> labels, std::size_t n, std::size_t classes, const char* op) {
  if (labels.size() != n) {
    throw ShapeError(std::string(op) + ": " + std::to_string(labels.size()) + " labels for " + std::to_string(n) +
                     " samples");
  }
  if (n == 0) throw ValueError(std::string(op) + ": empty batch");
  for (std::int32_t y : labels) {
    if (y < 0 || static_cast<std::size_t>(y) >= classes) {
      throw ValueError(std::string(op) + ": label " + std::to_string(y) + " has no prototype among " +
                       std::to_string(classes));
    }
  }
}

template <typename T>
void check_pair(Var<T> pooled, Var<T> prototypes, const char* op) {
  const auto& a = pooled.shape();
  const auto& b = prototypes.shape();
  if (a.size() != 2 || b.size() != 2 || a[1] != b[1]) {
    throw ShapeError(std::string(op) + ": representations " + num::shape_str(a) + " and prototypes " +
                     num::shape_str(b) + " differ in dimension");
  }
}

// Cosine similarity matrix rows(a) × rows(b), divided by the temperature.
template <typename T>
Var<T> scaled_cosine(Var<T> a, Var<T> b, const ContrastiveConfig& cfg) {
  Var<T> an = num::l2_normalize(a);
  Var<T> bn = num::l2_normalize(b);
  return num::scale(num::matmul(an, num::transpose(bn)), static_cast<T>(1.0 / cfg.temperature));
}

}  // namespace

void ContrastiveConfig::validate() const {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw ValueError("contrastive temperature must be positive, got " + std::to_string(temperature));
  }
}

void LossConfig::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw ValueError("lambda must be nonnegative, got " + std::to_string(lambda));
  }
}

template <typename T>
Var<T> classification_loss(Var<T> probs, std::span<const std::int32_t> labels) {
  return num::nll_from_probs(probs, labels);
}

template <typename T>
Var<T> supcon_z_to_s(Var<T> pooled, Var<T> prototypes, std::span<const std::int32_t> labels,
                     const ContrastiveConfig& cfg) {
  cfg.validate();
  check_pair(pooled, prototypes, "supcon_z_to_s");
  const std::size_t n = pooled.shape()[0];
  const std::size_t c = prototypes.shape()[0];
  check_labels(labels, n, c, "supcon_z_to_s");
  Var<T> log_prob = num::log_softmax(scaled_cosine(pooled, prototypes, cfg), 1);  // [N × C]
  num::Tensor<T> positives(num::Shape{n, c});
  for (std::size_t i = 0; i < n; ++i) positives.at(i, static_cast<std::size_t>(labels[i])) = T{-1};
  return num::sum(num::mul(log_prob, pooled.graph().constant(std::move(positives))));
}

template <typename T>
Var<T> supcon_s_to_z(Var<T> prototypes, Var<T> pooled, std::span<const std::int32_t> labels,
                     const ContrastiveConfig& cfg) {
  cfg.validate();
  check_pair(pooled, prototypes, "supcon_s_to_z");
  const std::size_t n = pooled.shape()[0];
  const std::size_t c = prototypes.shape()[0];
  check_labels(labels, n, c, "supcon_s_to_z");
  std::vector<std::size_t> class_count(c, 0);
  for (std::int32_t y : labels) ++class_count[static_cast<std::size_t>(y)];
  Var<T> log_prob = num::log_softmax(scaled_cosine(prototypes, pooled, cfg), 1);  // [C × N]
  num::Tensor<T> positives(num::Shape{c, n});
  for (std::size_t p = 0; p < n; ++p) {
    const auto j = static_cast<std::size_t>(labels[p]);
    positives.at(j, p) = static_cast<T>(-1.0 / static_cast<double>(class_count[j]));
  }
  return num::sum(num::mul(log_prob, pooled.graph().constant(std::move(positives))));
}

template <typename T>
Var<T> total_loss(Var<T> cls, Var<T> z2s, Var<T> s2z, const LossConfig& cfg) {
  cfg.validate();
  return num::add(cls, num::scale(num::add(s2z, z2s), static_cast<T>(cfg.lambda / 2.0)));
}

double total_loss(double cls, double z2s, double s2z, const LossConfig& cfg) {
  cfg.validate();
  return cls + cfg.lambda / 2.0 * (s2z + z2s);
}

template <typename T>
Var<T> masked_mean_pool(Var<T> z, std::span<const std::uint8_t> mask) {
  const std::size_t rows = z.shape()[0];
  if (mask.size() != rows) {
    throw ShapeError("masked_mean_pool: mask of length " + std::to_string(mask.size()) + " for " +
                     std::to_string(rows) + " rows");
  }
  std::size_t valid = 0;
  for (std::uint8_t m : mask) valid += m ? 1 : 0;
  if (valid == 0) throw ValueError("masked_mean_pool: every row is masked");
  num::Tensor<T> weights(num::Shape{1, rows});
  for (std::size_t r = 0; r < rows; ++r)
    if (mask[r]) weights[r] = static_cast<T>(1.0 / static_cast<double>(valid));
  return num::matmul(z.graph().constant(std::move(weights)), z);
}

template <typename T>
BatchObjective<T> batch_objective(Graph<T>& g, const fusion::Mspn<T>& model,
                                  std::span<const fusion::ModelInput<T>* const> inputs,
                                  std::span<const std::int32_t> labels, const LossConfig& loss_cfg,
                                  const ContrastiveConfig& contrastive_cfg) {
  if (inputs.empty()) throw ValueError("batch_objective: empty batch");
  check_labels(labels, inputs.size(), model.config().n_classes, "batch_objective");
  std::vector<Var<T>> probs, pooled;
  Var<T> prototype_sum;
  for (const fusion::ModelInput<T>* input : inputs) {
    fusion::MspnOutput<T> out = model.forward(g, *input);
    probs.push_back(out.probs);
    pooled.push_back(masked_mean_pool(out.z_final, out.z_mask));
    prototype_sum = prototype_sum.valid() ? num::add(prototype_sum, out.s_final) : out.s_final;
  }
  BatchObjective<T> obj;
  obj.probs = num::concat(probs, 0);
  obj.pooled = num::concat(pooled, 0);
  obj.prototypes = num::scale(prototype_sum, static_cast<T>(1.0 / static_cast<double>(inputs.size())));
  obj.classification = classification_loss(obj.probs, labels);
  obj.z_to_s = supcon_z_to_s(obj.pooled, obj.prototypes, labels, contrastive_cfg);
  obj.s_to_z = supcon_s_to_z(obj.prototypes, obj.pooled, labels, contrastive_cfg);
  obj.total = total_loss(obj.classification, obj.z_to_s, obj.s_to_z, loss_cfg);
  return obj;
}

#define AIVA_INSTANTIATE_LOSSES(T)                                                                             \
  template Var<T> classification_loss<T>(Var<T>, std::span<const std::int32_t>);                               \
  template Var<T> supcon_z_to_s<T>(Var<T>, Var<T>, std::span<const std::int32_t>, const ContrastiveConfig&);    \
  template Var<T> supcon_s_to_z<T>(Var<T>, Var<T>, std::span<const std::int32_t>, const ContrastiveConfig&);    \
  template Var<T> total_loss<T>(Var<T>, Var<T>, Var<T>, const LossConfig&);                                    \
  template Var<T> masked_mean_pool<T>(Var<T>, std::span<const std::uint8_t>);                                  \
  template BatchObjective<T> batch_objective<T>(Graph<T>&, const fusion::Mspn<T>&,                             \
                                                std::span<const fusion::ModelInput<T>* const>,                 \
                                                std::span<const std::int32_t>, const LossConfig&,              \
                                                const ContrastiveConfig&);

AIVA_INSTANTIATE_LOSSES(float)
AIVA_INSTANTIATE_LOSSES(double)

#undef AIVA_INSTANTIATE_LOSSES

}  // namespace aiva::obj
