// Copyright 2026 The AIVA Authors
// SPDX-License-Identifier: Apache-2.0

#include "aiva/numerics/grad_check.hpp"

#include <algorithm>
#include <cmath>

namespace aiva::num {
namespace {

double evaluate(const LossFn& loss) {
  Graph<double> g;
  const double v = loss(g).value().item();
  if (!std::isfinite(v)) throw NumericError("grad_check: non-finite function value");
  return v;
}

void record(GradCheckReport& report, double analytic, double numeric, std::size_t index, const std::string& name,
            const GradCheckOptions& opts) {
  const double abs_err = std::abs(analytic - numeric);
  const double denom = std::max({std::abs(analytic), std::abs(numeric), opts.floor});
  const double rel = abs_err / denom;
  report.max_abs_err = std::max(report.max_abs_err, abs_err);
  if (rel > report.max_rel_err || report.checked == 0) {
    report.max_rel_err = rel;
    report.worst_index = index;
    report.worst_name = name;
  }
  ++report.checked;
}

void check_options(const GradCheckOptions& opts) {
  if (!(opts.eps > 0.0)) throw ValueError("grad_check: eps must be positive");
}

}  // namespace

GradCheckReport grad_check(const ScalarFn& f, const Tensor<double>& x, GradCheckOptions opts) {
  check_options(opts);
  Tensor<double> probe = x;
  Tensor<double> analytic(x.shape());
  {
    Graph<double> g;
    Var<double> in = g.input(probe, true);
    Var<double> out = f(g, in);
    if (out.value().size() != 1) throw ShapeError("grad_check: function must be scalar-valued");
    if (!std::isfinite(out.value().item())) throw NumericError("grad_check: non-finite function value");
    g.backward(out);
    if (const Tensor<double>* gr = g.grad(in)) analytic = *gr;
  }
  const LossFn at_probe = [&](Graph<double>& g) { return f(g, g.input(probe, false)); };
  GradCheckReport report;
  for (std::size_t i = 0; i < probe.size(); ++i) {
    const double orig = probe[i];
    probe[i] = orig + opts.eps;
    const double up = evaluate(at_probe);
    probe[i] = orig - opts.eps;
    const double down = evaluate(at_probe);
    probe[i] = orig;
    record(report, analytic[i], (up - down) / (2.0 * opts.eps), i, "", opts);
  }
  return report;
}

GradCheckReport grad_check_params(const LossFn& loss, std::span<Parameter<double>* const> params,
                                  GradCheckOptions opts) {
  check_options(opts);
  std::vector<Tensor<double>> analytic;
  {
    Graph<double> g;
    Var<double> out = loss(g);
    if (out.value().size() != 1) throw ShapeError("grad_check: loss must be scalar-valued");
    g.backward(out);
    for (Parameter<double>* p : params) {
      const Tensor<double>* gr = g.grad_of(*p);
      analytic.push_back(gr ? *gr : Tensor<double>(p->value.shape()));
    }
  }
  GradCheckReport report;
  for (std::size_t k = 0; k < params.size(); ++k) {
    Parameter<double>& p = *params[k];
    if (!p.trainable) continue;
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      const double orig = p.value[i];
      p.value[i] = orig + opts.eps;
      const double up = evaluate(loss);
      p.value[i] = orig - opts.eps;
      const double down = evaluate(loss);
      p.value[i] = orig;
      record(report, analytic[k][i], (up - down) / (2.0 * opts.eps), i, p.name, opts);
    }
  }
  return report;
}

}  // namespace aiva::num
