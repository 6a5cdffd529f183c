// Copyright 2026 The AIVA Authors
// SPDX-License-Identifier: Apache-2.0

#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "test_support.hpp"

namespace aiva::cli {
namespace {

using nlohmann::json;

struct CliRun {
  int code;
  std::string out, err;
};

CliRun run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// First line of stderr is the effective-configuration echo.
json echoed(const CliRun& r) { return json::parse(r.err.substr(0, r.err.find('\n'))).at("effective_config"); }

std::vector<std::string> small_gen(const std::string& out) {
  return {"--seed", "3", "gen-data", "--out", out, "--samples-per-class", "12", "--image-size", "8"};
}

TEST(Cli, HelpAndUsageExitCodes) {
  EXPECT_EQ(run({"--help"}).code, kExitOk);
  EXPECT_EQ(run({}).code, kExitUsage);
  EXPECT_EQ(run({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(run({"train", "--data", "x"}).code, kExitUsage);
}

TEST(Cli, InvalidValueNamesTheField) {
  testing::TempDir dir;
  const CliRun r = run({"gen-data", "--out", (dir / "d").string(), "--noise", "-1"});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find("noise"), std::string::npos) << r.err;
}

TEST(Cli, RuntimeFailureExitCode) {
  const CliRun r = run({"eval", "--checkpoint", "/nonexistent/model.ckpt", "--data", "/nonexistent"});
  EXPECT_EQ(r.code, kExitRuntime);
  EXPECT_NE(r.err.find("error:"), std::string::npos);
}

TEST(Cli, GenDataIsReproducible) {
  testing::TempDir dir;
  const CliRun a = run(small_gen((dir / "a").string()));
  const CliRun b = run(small_gen((dir / "b").string()));
  ASSERT_EQ(a.code, kExitOk) << a.err;
  ASSERT_EQ(b.code, kExitOk) << b.err;
  for (const char* name : {"train.jsonl", "val.jsonl", "test.jsonl", "report.json"}) {
    EXPECT_TRUE(std::filesystem::exists(dir / "a" / name)) << name;
    EXPECT_EQ(slurp(dir / "a" / name), slurp(dir / "b" / name)) << name;
  }
  EXPECT_EQ(echoed(a).at("spec").at("seed"), 3);
}

TEST(Cli, TrainEchoesDefaultsThenEvalAndInfer) {
  testing::TempDir dir;
  const std::string data = (dir / "data").string();
  auto gen = small_gen(data);
  gen.insert(gen.end(), {"--noise", "0", "--overlap", "0"});
  ASSERT_EQ(run(gen).code, kExitOk);

  const std::vector<std::string> model_flags = {"--d-model", "16", "--heads", "2", "--text-layers", "1",
                                                "--vision-layers", "1", "--fusion-layers", "1", "--image-size",
                                                "8", "--patch", "4", "--max-len", "12"};
  // Default learning rate, one epoch, just to inspect the echo.
  std::vector<std::string> args = {"train", "--data", data, "--out", (dir / "m0").string(), "--epochs", "1"};
  args.insert(args.end(), model_flags.begin(), model_flags.end());
  CliRun r = run(args);
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(echoed(r).at("train").at("learning_rate"), 2e-5);

  args = {"train", "--data", data, "--out", (dir / "m").string(), "--epochs", "40", "--lr", "1e-3",
          "--batch-size", "6"};
  args.insert(args.end(), model_flags.begin(), model_flags.end());
  r = run(args);
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const json summary = json::parse(r.out);
  EXPECT_EQ(summary.at("epochs"), 40);
  const std::string ckpt = (dir / "m" / "model.ckpt").string();
  EXPECT_TRUE(std::filesystem::exists(dir / "m" / "history.csv"));

  r = run({"eval", "--checkpoint", ckpt, "--data", data, "--split", "train"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(json::parse(r.out).at("accuracy"), 1.0);

  r = run({"infer", "--checkpoint", ckpt, "--text", "hello"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const json inferred = json::parse(r.out);
  EXPECT_EQ(inferred.at("probabilities").size(), 3u);
  EXPECT_TRUE(inferred.at("expression").is_string());

  EXPECT_EQ(run({"eval", "--checkpoint", ckpt, "--data", data, "--split", "holdout"}).code, kExitUsage);
}

TEST(Cli, ImportMvsaFixture) {
  testing::TempDir dir;
  const CliRun r = run({"import-mvsa", "--dir", std::string(AIVA_FIXTURE_DIR) + "/mvsa_mini", "--out",
                     (dir / "out").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(json::parse(r.out).at("kept"), 7);
  EXPECT_TRUE(std::filesystem::exists(dir / "out" / "train.jsonl"));
}

TEST(Cli, ServeNeedsCheckpoint) {
  const CliRun r = run({"serve", "--llm-mode", "stub"});
  EXPECT_EQ(r.code, kExitUsage);
}

}  // namespace
}  // namespace aiva::cli
