// Copyright 2026 The AIVA Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>

#include "aiva/numerics/graph.hpp"

namespace aiva::num {

struct GradCheckOptions {
  double eps = 1e-6;
  // Relative error is |analytic - numeric| / max(|analytic|, |numeric|, floor).
  double floor = 1e-6;
};

struct GradCheckReport {
  double max_rel_err = 0.0;
  double max_abs_err = 0.0;
  std::size_t worst_index = 0;
  std::string worst_name;  // parameter name for parameter checks
  std::size_t checked = 0;
};

// Builds a scalar from a fresh graph and one differentiable input.
using ScalarFn = std::function<Var<double>(Graph<double>&, Var<double>)>;

/// Compares the analytic gradient of f at x with central differences
/// (f(x+eps·e) − f(x−eps·e)) / (2·eps). Throws NumericError when f is not
/// finite at a probe point.
GradCheckReport grad_check(const ScalarFn& f, const Tensor<double>& x, GradCheckOptions opts = {});

// Builds a scalar loss from a fresh graph; the parameters it reads are
// perturbed in place and restored afterwards.
using LossFn = std::function<Var<double>(Graph<double>&)>;

/// Same comparison over every entry of every listed trainable parameter.
GradCheckReport grad_check_params(const LossFn& loss, std::span<Parameter<double>* const> params,
                                  GradCheckOptions opts = {});

}  // namespace aiva::num
