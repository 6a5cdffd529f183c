// Copyright 2026 The AIVA Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <random>
#include <set>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "aiva/fusion/mspn.hpp"
#include "test_support.hpp"

namespace aiva::fusion {
namespace {

using num::Graph;
using num::Tensor;
using testing::random_input;
using testing::tiny_config;

// Random small configuration; d is a multiple of the head count.
ModelConfig random_config(std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> pick_heads(1, 3), pick_len(2, 7), pick_grid(1, 3), pick_c(2, 5),
      pick_layers(1, 3);
  ModelConfig c = tiny_config();
  c.heads = std::size_t{1} << (pick_heads(rng) - 1);
  c.d_model = c.heads * 4 * pick_heads(rng);
  c.max_len = pick_len(rng);
  c.patch = 2;
  c.image_height = 2 * pick_grid(rng);
  c.image_width = 2 * pick_grid(rng);
  c.n_classes = pick_c(rng);
  c.labels = default_labels(c.n_classes);
  c.n_fusion_layers = pick_layers(rng);
  return c;
}

void expect_row_stochastic(const Tensor<double>& w) {
  for (std::size_t r = 0; r < w.rows(); ++r) {
    double s = 0.0;
    for (std::size_t col = 0; col < w.cols(); ++col) {
      EXPECT_GE(w.at(r, col), 0.0);
      s += w.at(r, col);
    }
    EXPECT_NEAR(s, 1.0, 1e-6);
  }
}

TEST(ModelConfig, ValidateRejectsBadShapes) {
  ModelConfig c = tiny_config();
  c.heads = 3;
  EXPECT_THROW(c.validate(), ValueError);
  c = tiny_config();
  c.n_classes = 1;
  c.labels = {"only"};
  EXPECT_THROW(c.validate(), ValueError);
  c = tiny_config();
  c.labels.pop_back();
  EXPECT_THROW(c.validate(), ValueError);
  c = tiny_config();
  c.vocab_size = 0;
  EXPECT_THROW(c.validate(), ValueError);
}

TEST(ModelConfig, JsonRoundTrip) {
  ModelConfig c = tiny_config(7);
  c.z_update = ZUpdate::kFrozen;
  c.fusion_input = FusionInput::kConcat;
  c.fusion_stack = false;
  const nlohmann::json j = c;
  const ModelConfig back = j.get<ModelConfig>();
  EXPECT_EQ(nlohmann::json(back), j);
  EXPECT_EQ(back.labels, default_labels(7));
}

TEST(ModelConfig, DefaultLabels) {
  EXPECT_EQ(default_labels(3), (std::vector<std::string>{"positive", "neutral", "negative"}));
  EXPECT_EQ(default_labels(7).size(), 7u);
  EXPECT_EQ(default_labels(4).back(), "class_3");
}

TEST(InitPrototypes, DeterministicShapeAndScale) {
  const auto a = init_prototypes<double>(3, 64, 11);
  const auto b = init_prototypes<double>(3, 64, 11);
  const auto c = init_prototypes<double>(3, 64, 12);
  EXPECT_EQ(a.shape(), (num::Shape{3, 64}));
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
  const auto big = init_prototypes<double>(64, 256, 1);
  double sq = 0.0;
  for (double v : big.values()) sq += v * v;
  EXPECT_NEAR(std::sqrt(sq / static_cast<double>(big.size())), 1.0 / 16.0, 0.004);
  EXPECT_THROW(init_prototypes<double>(1, 4, 0), ValueError);
}

TEST(CrossAttentionFuse, ShapesPerDirection) {
  // L=4 text tokens, M=6 visual tokens.
  nn::ParamRng rng(3);
  nn::AttentionParams<double> tp, vp;
  tp.init("t", 8, 2, rng);
  vp.init("v", 8, 2, rng);
  std::mt19937_64 gen(1);
  std::normal_distribution<double> dist;
  Tensor<double> t({4, 8}), v({6, 8});
  for (auto& x : t.values()) x = dist(gen);
  for (auto& x : v.values()) x = dist(gen);
  Graph<double> g;
  const auto out = cross_attention_fuse(g, tp, vp, g.constant(t), g.constant(v), {});
  EXPECT_EQ(out.z0.shape()[0], 10u);
  EXPECT_EQ(out.t_hat.shape()[0], 6u);
  EXPECT_EQ(out.v_hat.shape()[0], 4u);
  EXPECT_EQ(out.z_mask.size(), 10u);
  EXPECT_EQ(out.weights.size(), 4u);
  for (const auto& w : out.weights) expect_row_stochastic(w.value());
  EXPECT_THROW(cross_attention_fuse(g, tp, vp, g.constant(t), g.constant(Tensor<double>({6, 4})), {}), ShapeError);
}

TEST(CrossAttentionFuse, ZeroValueProjectionGivesZeroOutputs) {
  nn::ParamRng rng(4);
  nn::AttentionParams<double> tp, vp;
  tp.init("t", 8, 2, rng);
  vp.init("v", 8, 2, rng);
  tp.wv.value = Tensor<double>({8, 8});
  vp.wv.value = Tensor<double>({8, 8});
  Graph<double> g;
  const auto out =
      cross_attention_fuse(g, tp, vp, g.constant(Tensor<double>({4, 8}, 0.3)), g.constant(Tensor<double>({6, 8}, -1.0)), {});
  for (double x : out.z0.value().values()) EXPECT_EQ(x, 0.0);
  for (const auto& w : out.weights) expect_row_stochastic(w.value());
}

TEST(CrossAttentionFuse, PaddedTextIsNeverAttended) {
  nn::ParamRng rng(5);
  nn::AttentionParams<double> tp, vp;
  tp.init("t", 8, 2, rng);
  vp.init("v", 8, 2, rng);
  const std::vector<std::uint8_t> mask = {1, 1, 0, 0};
  Graph<double> g;
  std::mt19937_64 gen(2);
  std::normal_distribution<double> dist;
  Tensor<double> t({4, 8}), v({3, 8});
  for (auto& x : t.values()) x = dist(gen);
  for (auto& x : v.values()) x = dist(gen);
  const auto out = cross_attention_fuse(g, tp, vp, g.constant(t), g.constant(v), mask);
  // The first head weights belong to visual queries over text keys.
  const auto& w = out.weights.front().value();
  for (std::size_t r = 0; r < w.rows(); ++r) {
    EXPECT_EQ(w.at(r, 2), 0.0);
    EXPECT_EQ(w.at(r, 3), 0.0);
  }
  EXPECT_EQ(out.z_mask, (std::vector<std::uint8_t>{1, 1, 1, 1, 1, 0, 0}));
}

TEST(Mspn, RandomizedInvariants) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 12; ++trial) {
    const ModelConfig cfg = random_config(rng);
    Mspn<double> model(cfg, rng());
    const auto input = random_input<double>(cfg, rng);
    Graph<double> g;
    nn::AttentionTrace<double> trace;
    const auto out = model.forward(g, input, &trace);
    ASSERT_FALSE(trace.empty());
    for (const auto& w : trace) expect_row_stochastic(w);
    ASSERT_EQ(out.states.size(), cfg.n_fusion_layers + 1);
    for (const auto& s : out.states) {
      EXPECT_EQ(s.z.shape(), (num::Shape{cfg.fused_tokens(), cfg.d_model}));
      EXPECT_EQ(s.s.shape(), (num::Shape{cfg.n_classes, cfg.d_model}));
    }
    const auto& p = out.probs.value();
    ASSERT_EQ(p.shape(), (num::Shape{1, cfg.n_classes}));
    double total = 0.0;
    for (double v : p.values()) {
      EXPECT_GE(v, 0.0);
      total += v;
    }
    EXPECT_NEAR(total, 1.0, 1e-6);
  }
}

TEST(Mspn, ZeroPrototypeValueKeepsPrototypesThroughAllLayers) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    const ModelConfig cfg = random_config(rng);
    Mspn<double> model(cfg, rng());
    for (auto& layer : model.params().layers) layer.prototype.wv.value = Tensor<double>(layer.prototype.wv.value.shape());
    Graph<double> g;
    const auto out = model.forward(g, random_input<double>(cfg, rng));
    EXPECT_EQ(out.s_final.value(), model.params().prototypes.value);
  }
}

TEST(Mspn, FrozenZUpdateKeepsZ0) {
  ModelConfig cfg = tiny_config();
  cfg.n_fusion_layers = 3;
  cfg.z_update = ZUpdate::kFrozen;
  Mspn<double> model(cfg, 1);
  std::mt19937_64 rng(1);
  Graph<double> g;
  const auto out = model.forward(g, random_input<double>(cfg, rng));
  EXPECT_EQ(out.z_final.value(), out.z0.value());
}

TEST(Mspn, ZeroClassifierGivesUniform) {
  for (std::size_t c : {2u, 3u, 7u}) {
    ModelConfig cfg = tiny_config(c);
    Mspn<double> model(cfg, 2);
    auto& p = model.params();
    p.classifier_hidden.weight.value = Tensor<double>(p.classifier_hidden.weight.value.shape());
    p.classifier_hidden.bias.value = Tensor<double>(p.classifier_hidden.bias.value.shape());
    p.classifier_out.weight.value = Tensor<double>(p.classifier_out.weight.value.shape());
    p.classifier_out.bias.value = Tensor<double>(p.classifier_out.bias.value.shape());
    std::mt19937_64 rng(3);
    const Prediction pred = model.predict(random_input<double>(cfg, rng));
    for (double v : pred.probabilities) EXPECT_NEAR(v, 1.0 / static_cast<double>(c), 1e-12);
  }
}

TEST(Mspn, PredictionIsDeterministicAndConsistent) {
  const ModelConfig cfg = tiny_config();
  Mspn<double> a(cfg, 9), b(cfg, 9);
  std::mt19937_64 rng(4);
  const auto input = random_input<double>(cfg, rng);
  const Prediction pa = a.predict(input);
  const Prediction pb = b.predict(input);
  EXPECT_EQ(pa.probabilities, pb.probabilities);
  EXPECT_EQ(pa.logits, pb.logits);
  const auto arg = [](const std::vector<double>& v) {
    return static_cast<std::int32_t>(std::max_element(v.begin(), v.end()) - v.begin());
  };
  EXPECT_EQ(pa.label, arg(pa.probabilities));
  EXPECT_EQ(pa.label, arg(pa.logits));
}

TEST(Mspn, ArgmaxInvariantToLogitShift) {
  const ModelConfig cfg = tiny_config();
  Mspn<double> model(cfg, 10);
  std::mt19937_64 rng(5);
  const auto input = random_input<double>(cfg, rng);
  const Prediction before = model.predict(input);
  model.params().classifier_out.bias.value[0] += 5.0;
  const Prediction after = model.predict(input);
  EXPECT_EQ(before.label, after.label);
  for (std::size_t k = 0; k < before.probabilities.size(); ++k)
    EXPECT_NEAR(before.probabilities[k], after.probabilities[k], 1e-12);
}

TEST(Mspn, AblationVariantsKeepShapes) {
  std::mt19937_64 rng(6);
  for (auto [input_kind, stack] : {std::pair{FusionInput::kConcat, true}, std::pair{FusionInput::kCrossAttention, false}}) {
    ModelConfig cfg = tiny_config();
    cfg.n_fusion_layers = 2;
    cfg.fusion_input = input_kind;
    cfg.fusion_stack = stack;
    Mspn<double> model(cfg, 1);
    Graph<double> g;
    const auto out = model.forward(g, random_input<double>(cfg, rng));
    EXPECT_EQ(out.z_final.shape()[0], cfg.fused_tokens());
    EXPECT_EQ(out.states.size(), stack ? 3u : 2u);
  }
}

TEST(Mspn, ConcatInputIsRawTokens) {
  ModelConfig cfg = tiny_config();
  cfg.fusion_input = FusionInput::kConcat;
  Mspn<double> model(cfg, 1);
  std::mt19937_64 rng(8);
  Graph<double> g;
  const auto out = model.forward(g, random_input<double>(cfg, rng));
  const auto& z0 = out.z0.value();
  const auto& t = out.text_tokens.value();
  const auto& v = out.visual_tokens.value();
  EXPECT_EQ(z0.at(0, 0), t.at(0, 0));
  EXPECT_EQ(z0.at(cfg.max_len, 3), v.at(0, 3));
}

TEST(Mspn, ConvertPreservesPredictionsApproximately) {
  const ModelConfig cfg = tiny_config();
  Mspn<double> model(cfg, 3);
  const Mspn<float> f = convert<float>(model);
  std::mt19937_64 rng(9);
  const auto in_d = random_input<double>(cfg, rng);
  ModelInput<float> in_f{in_d.tokens, in_d.image.cast<float>()};
  const auto pd = model.predict(in_d);
  const auto pf = f.predict(in_f);
  for (std::size_t k = 0; k < pd.probabilities.size(); ++k) EXPECT_NEAR(pd.probabilities[k], pf.probabilities[k], 1e-4);
}

TEST(Mspn, ParameterNamesAreUnique) {
  Mspn<float> model(tiny_config(), 1);
  std::set<std::string> names;
  for (auto* p : model.parameters()) EXPECT_TRUE(names.insert(p->name).second) << p->name;
  EXPECT_TRUE(names.count("prototypes"));
}

}  // namespace
}  // namespace aiva::fusion
