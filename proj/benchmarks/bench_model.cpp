// Copyright 2026 The AIVA Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <random>

#include "aiva/datasets/synth.hpp"
#include "aiva/fusion/mspn.hpp"
#include "aiva/numerics/ops.hpp"
#include "aiva/objectives/losses.hpp"
#include "aiva/training/adam.hpp"
#include "aiva/training/trainer.hpp"

namespace {

using aiva::num::Graph;
using aiva::num::Tensor;

Tensor<float> random_matrix(std::size_t r, std::size_t c, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> n(0.0f, 1.0f);
  Tensor<float> t({r, c});
  for (auto& v : t.values()) v = n(rng);
  return t;
}

void BM_MatMul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = random_matrix(n, n, 1);
  const auto b = random_matrix(n, n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(aiva::num::matmul(a, b));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(2 * n * n * n));
}
BENCHMARK(BM_MatMul)->Arg(16)->Arg(64)->Arg(128);

struct Fixture {
  aiva::enc::Vocabulary vocab;
  aiva::fusion::ModelConfig config;
  std::vector<aiva::fusion::ModelInput<float>> inputs;
  std::vector<std::int32_t> labels;

  explicit Fixture(std::size_t n) {
    aiva::data::SynthSpec spec;
    spec.samples_per_class = n;
    const auto data = aiva::data::synth_generate(spec).records;
    std::vector<std::string> texts;
    for (const auto& r : data) texts.push_back(r.text);
    vocab = aiva::enc::Vocabulary::build(texts);
    config.vocab_size = vocab.size();
    config.labels = aiva::fusion::default_labels(config.n_classes);
    inputs = aiva::train::prepare_inputs(data, vocab, config);
    for (const auto& r : data) labels.push_back(r.label);
  }
};

void BM_Forward(benchmark::State& state) {
  const Fixture fx(2);
  const aiva::fusion::Mspn<float> model(fx.config, 0);
  for (auto _ : state) benchmark::DoNotOptimize(model.predict(fx.inputs[0]));
}
BENCHMARK(BM_Forward)->Unit(benchmark::kMillisecond);

void BM_TrainStep(benchmark::State& state) {
  const auto batch = static_cast<std::size_t>(state.range(0));
  const Fixture fx(batch);
  aiva::fusion::Mspn<float> model(fx.config, 0);
  auto params = model.parameters();
  auto adam = aiva::train::AdamState<float>::zeros(params);
  std::vector<const aiva::fusion::ModelInput<float>*> ptrs;
  std::vector<std::int32_t> labels;
  for (std::size_t i = 0; i < batch; ++i) {
    ptrs.push_back(&fx.inputs[i]);
    labels.push_back(fx.labels[i]);
  }
  std::vector<const Tensor<float>*> grads(params.size());
  for (auto _ : state) {
    Graph<float> g;
    const auto obj = aiva::obj::batch_objective<float>(g, model, ptrs, labels, {1.0}, {0.1});
    g.backward(obj.total);
    for (std::size_t p = 0; p < params.size(); ++p) grads[p] = g.grad_of(*params[p]);
    aiva::train::adam_step<float>(params, grads, adam, 1e-3);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(batch));
}
BENCHMARK(BM_TrainStep)->Arg(16)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
