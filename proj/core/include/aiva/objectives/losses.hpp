// Copyright 2026 The AIVA Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>

#include "aiva/fusion/mspn.hpp"

// Training objective: cross-entropy on the prototype classifier plus
// prototype-level supervised contrastive terms in both directions.
// All losses are batch sums.
namespace aiva::obj {

using num::Graph;
using num::Var;

struct ContrastiveConfig {
  // Similarity is cos(a, b) / temperature; 1.0 gives plain cosine.
  double temperature = 0.1;
  void validate() const;
};

struct LossConfig {
  double lambda = 1.0;
  void validate() const;
};

/// -Σ_i log p̂_i[y_i], log clamped at 1e-12.
template <typename T>
Var<T> classification_loss(Var<T> probs, std::span<const std::int32_t> labels);

/// Each sample anchors against all C prototypes; its positive is the
/// prototype of its own class.
template <typename T>
Var<T> supcon_z_to_s(Var<T> pooled, Var<T> prototypes, std::span<const std::int32_t> labels,
                     const ContrastiveConfig& cfg);

/// Each prototype whose class occurs in the batch anchors against all N
/// samples, with the samples of its class as positives. Absent classes
/// contribute nothing.
template <typename T>
Var<T> supcon_s_to_z(Var<T> prototypes, Var<T> pooled, std::span<const std::int32_t> labels,
                     const ContrastiveConfig& cfg);

/// cls + λ/2 · (z2s + s2z)
template <typename T>
Var<T> total_loss(Var<T> cls, Var<T> z2s, Var<T> s2z, const LossConfig& cfg);
double total_loss(double cls, double z2s, double s2z, const LossConfig& cfg);

/// Mean of the rows of z whose mask entry is 1, as [1 × d].
template <typename T>
Var<T> masked_mean_pool(Var<T> z, std::span<const std::uint8_t> mask);

template <typename T>
struct BatchObjective {
  Var<T> total;
  Var<T> classification;
  Var<T> z_to_s;
  Var<T> s_to_z;
  Var<T> probs;       // [N × C]
  Var<T> pooled;      // [N × d]
  Var<T> prototypes;  // [C × d], batch mean of per-sample final prototypes
};

/// Runs the model over a batch and assembles every loss term.
template <typename T>
BatchObjective<T> batch_objective(Graph<T>& g, const fusion::Mspn<T>& model,
                                  std::span<const fusion::ModelInput<T>* const> inputs,
                                  std::span<const std::int32_t> labels, const LossConfig& loss_cfg,
                                  const ContrastiveConfig& contrastive_cfg);

}  // namespace aiva::obj
