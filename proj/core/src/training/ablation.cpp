// Copyright 2026 The AIVA Authors
// SPDX-License-Identifier: Apache-2.0

#include "aiva/training/ablation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <spdlog/spdlog.h>

#include "aiva/error.hpp"

namespace aiva::train {
namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string lambda_name(double lambda) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "lambda=%g", lambda);
  return buf;
}

AblationRun run_one(const TrainConfig& config, const std::string& name, const data::Dataset& train_set,
                    const data::Dataset& eval_set) {
  const TrainResult result = train(config, train_set, {});
  const Metrics m = evaluate(result.checkpoint, eval_set);
  spdlog::info("{} seed {}: accuracy {:.4f}, f1 {:.4f}", name, config.seed, m.accuracy, m.macro_f1);
  return AblationRun{name, config.seed, m.accuracy, m.macro_f1};
}

void check_seeds(std::span<const std::uint64_t> seeds) {
  if (seeds.empty()) throw ValueError("at least one seed is required");
}

}  // namespace

std::string to_string(Variant v) {
  switch (v) {
    case Variant::kFull: return "full";
    case Variant::kNoCaf: return "no_caf";
    case Variant::kNoCmft: return "no_cmft";
    case Variant::kNoScl: return "no_scl";
  }
  return "full";
}

Variant parse_variant(const std::string& name) {
  for (Variant v : {Variant::kFull, Variant::kNoCaf, Variant::kNoCmft, Variant::kNoScl})
    if (to_string(v) == name) return v;
  throw ValueError("unknown variant \"" + name + "\" (expected full, no_caf, no_cmft or no_scl)");
}

TrainConfig apply_variant(TrainConfig config, Variant v) {
  switch (v) {
    case Variant::kFull: break;
    case Variant::kNoCaf: config.model.fusion_input = fusion::FusionInput::kConcat; break;
    case Variant::kNoCmft: config.model.fusion_stack = false; break;
    case Variant::kNoScl: config.lambda = 0.0; break;
  }
  return config;
}

const AblationSummary& AblationTable::find(const std::string& variant) const {
  for (const auto& s : summary)
    if (s.variant == variant) return s;
  throw NotFoundError("no summary for variant \"" + variant + "\"");
}

AblationTable summarize(std::vector<AblationRun> runs) {
  AblationTable table;
  table.runs = std::move(runs);
  std::vector<std::string> order;
  for (const auto& r : table.runs)
    if (std::find(order.begin(), order.end(), r.variant) == order.end()) order.push_back(r.variant);
  for (const std::string& name : order) {
    std::vector<const AblationRun*> rows;
    for (const auto& r : table.runs)
      if (r.variant == name) rows.push_back(&r);
    const auto n = static_cast<double>(rows.size());
    AblationSummary s{name};
    for (const auto* r : rows) {
      s.accuracy_mean += r->accuracy / n;
      s.f1_mean += r->f1 / n;
    }
    if (rows.size() > 1) {
      for (const auto* r : rows) {
        s.accuracy_std += (r->accuracy - s.accuracy_mean) * (r->accuracy - s.accuracy_mean);
        s.f1_std += (r->f1 - s.f1_mean) * (r->f1 - s.f1_mean);
      }
      s.accuracy_std = std::sqrt(s.accuracy_std / (n - 1));
      s.f1_std = std::sqrt(s.f1_std / (n - 1));
    }
    table.summary.push_back(s);
  }
  return table;
}

std::string ablation_csv(const AblationTable& table) {
  std::ostringstream out;
  out << "variant,seed,accuracy,f1\n";
  for (const auto& r : table.runs) out << r.variant << ',' << r.seed << ',' << fmt(r.accuracy) << ',' << fmt(r.f1) << '\n';
  for (const auto& s : table.summary) {
    out << s.variant << ",mean," << fmt(s.accuracy_mean) << ',' << fmt(s.f1_mean) << '\n';
    out << s.variant << ",std," << fmt(s.accuracy_std) << ',' << fmt(s.f1_std) << '\n';
  }
  return out.str();
}

AblationTable run_ablation(const TrainConfig& base, const data::Dataset& train_set, const data::Dataset& eval_set,
                           std::span<const Variant> variants, std::span<const std::uint64_t> seeds,
                           const RunCallback& on_run) {
  check_seeds(seeds);
  if (variants.empty()) throw ValueError("at least one variant is required");
  std::vector<AblationRun> runs;
  for (Variant v : variants) {
    for (std::uint64_t seed : seeds) {
      TrainConfig cfg = apply_variant(base, v);
      cfg.seed = seed;
      runs.push_back(run_one(cfg, to_string(v), train_set, eval_set));
      if (on_run) on_run(runs.back());
    }
  }
  return summarize(std::move(runs));
}

AblationTable run_lambda_sweep(const TrainConfig& base, const data::Dataset& train_set, const data::Dataset& eval_set,
                               std::span<const double> lambdas, std::span<const std::uint64_t> seeds,
                               const RunCallback& on_run) {
  check_seeds(seeds);
  if (lambdas.empty()) throw ValueError("at least one lambda is required");
  std::vector<AblationRun> runs;
  for (double lambda : lambdas) {
    for (std::uint64_t seed : seeds) {
      TrainConfig cfg = base;
      cfg.lambda = lambda;
      cfg.seed = seed;
      runs.push_back(run_one(cfg, lambda_name(lambda), train_set, eval_set));
      if (on_run) on_run(runs.back());
    }
  }
  return summarize(std::move(runs));
}

}  // namespace aiva::train
