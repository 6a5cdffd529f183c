// Copyright 2026 The AIVA Authors
// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

#include <pthread.h>

#include <algorithm>
#include <csignal>
#include <cstdlib>
#include <fstream>
#include <ostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "aiva/agent/expression.hpp"
#include "aiva/agent/http_server.hpp"
#include "aiva/agent/service.hpp"
#include "aiva/datasets/mvsa_import.hpp"
#include "aiva/datasets/synth.hpp"
#include "aiva/error.hpp"
#include "aiva/training/ablation.hpp"
#include "aiva/training/trainer.hpp"

namespace aiva::cli {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

class UsageError : public Error {
 public:
  using Error::Error;
};

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file " + path);
  try {
    json j = json::parse(in);
    if (!j.is_object()) throw UsageError("config file " + path + " must hold a JSON object");
    return j;
  } catch (const json::exception& e) {
    throw UsageError("config file " + path + " is not valid JSON: " + e.what());
  }
}

// Parses a resolved configuration, reporting bad values as usage errors.
template <typename T>
T resolve(const json& effective) {
  try {
    T value = effective.get<T>();
    value.validate();
    return value;
  } catch (const json::exception& e) {
    throw UsageError(std::string("invalid configuration: ") + e.what());
  } catch (const ValueError& e) {
    throw UsageError(e.what());
  }
}

void echo(std::ostream& err, const std::string& command, const json& config) {
  err << json{{"command", command}, {"effective_config", config}}.dump() << std::endl;
}

std::string env_or(const char* name, const std::string& fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : fallback;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
}

void write_splits(const data::Dataset& records, const fs::path& dir) {
  data::save_jsonl(data::filter_split(records, data::Split::kTrain), dir / "train.jsonl");
  data::save_jsonl(data::filter_split(records, data::Split::kVal), dir / "val.jsonl");
  data::save_jsonl(data::filter_split(records, data::Split::kTest), dir / "test.jsonl");
}

struct Splits {
  data::Dataset train, val, test;
};

// A directory holds train/val/test.jsonl; a single file is split by its
// "split" field.
Splits load_splits(const fs::path& path) {
  Splits s;
  if (fs::is_directory(path)) {
    auto load_if = [&](const char* name, data::Dataset& into) {
      if (fs::exists(path / name)) into = data::load_jsonl(path / name);
    };
    load_if("train.jsonl", s.train);
    load_if("val.jsonl", s.val);
    load_if("test.jsonl", s.test);
    return s;
  }
  const auto all = data::load_jsonl(path);
  s.train = data::filter_split(all, data::Split::kTrain);
  s.val = data::filter_split(all, data::Split::kVal);
  s.test = data::filter_split(all, data::Split::kTest);
  return s;
}

void check_label_space(const data::Dataset& records, std::size_t n_classes, const std::string& what) {
  const std::size_t needed = data::label_space(records);
  if (needed > n_classes) {
    throw Error("label space mismatch: " + what + " needs C=" + std::to_string(needed) + " but the model has C=" +
                std::to_string(n_classes));
  }
}

// --overlap is shorthand for both overlap knobs; explicit knobs win.
json expand_overlap(json j) {
  if (j.contains("overlap")) {
    if (!j.contains("text_overlap")) j["text_overlap"] = j["overlap"];
    if (!j.contains("visual_overlap")) j["visual_overlap"] = j["overlap"];
    j.erase("overlap");
  }
  return j;
}

template <typename T>
void json_flag(CLI::App* app, const std::string& name, json& flags, std::vector<std::string> path,
               const std::string& help) {
  app->add_option_function<T>(
      name,
      [&flags, path](const T& v) {
        json* node = &flags;
        for (std::size_t i = 0; i + 1 < path.size(); ++i) node = &(*node)[path[i]];
        (*node)[path.back()] = v;
      },
      help);
}

void add_training_flags(CLI::App* app, json& flags) {
  json_flag<double>(app, "--lr", flags, {"learning_rate"}, "Adam learning rate (default 2e-5)");
  json_flag<std::size_t>(app, "--batch-size", flags, {"batch_size"}, "Batch size, at least 2");
  json_flag<std::size_t>(app, "--epochs", flags, {"epochs"}, "Training epochs");
  json_flag<double>(app, "--lambda", flags, {"lambda"}, "Weight of the contrastive terms");
  json_flag<double>(app, "--tau", flags, {"tau"}, "Contrastive temperature");
  json_flag<std::size_t>(app, "--classes", flags, {"model", "n_classes"}, "Number of sentiment classes");
  json_flag<std::size_t>(app, "--d-model", flags, {"model", "d_model"}, "Model width");
  json_flag<std::size_t>(app, "--heads", flags, {"model", "heads"}, "Attention heads");
  json_flag<std::size_t>(app, "--text-layers", flags, {"model", "text_layers"}, "Text encoder blocks");
  json_flag<std::size_t>(app, "--vision-layers", flags, {"model", "vision_layers"}, "Image encoder blocks");
  json_flag<std::size_t>(app, "--fusion-layers", flags, {"model", "n_fusion_layers"}, "Fusion layers");
  json_flag<std::size_t>(app, "--max-len", flags, {"model", "max_len"}, "Text length in tokens, [CLS] included");
  json_flag<std::size_t>(app, "--image-size", flags, {"model", "image_height"}, "Model image height");
  json_flag<std::size_t>(app, "--image-width", flags, {"model", "image_width"}, "Model image width");
  json_flag<std::size_t>(app, "--channels", flags, {"model", "channels"}, "Model image channels (1 or 3)");
  json_flag<std::size_t>(app, "--patch", flags, {"model", "patch"}, "Patch size");
  json_flag<std::string>(app, "--z-update", flags, {"model", "z_update"}, "self_attention or frozen");
}

// --image-size sets both sides unless --image-width is also given.
void square_image(json& flags) {
  if (flags.contains("model") && flags["model"].contains("image_height") && !flags["model"].contains("image_width")) {
    flags["model"]["image_width"] = flags["model"]["image_height"];
  }
}

train::TrainConfig resolve_train_config(const json& file, json flags, json& effective) {
  square_image(flags);
  effective = train::TrainConfig{};
  effective.merge_patch(file);
  effective.merge_patch(flags);
  auto config = resolve<train::TrainConfig>(effective);
  // The vocabulary size is only known after reading the data; check the rest now.
  fusion::ModelConfig probe = config.model;
  probe.vocab_size = std::max(probe.vocab_size, enc::Vocabulary::kReserved);
  if (probe.labels.empty()) probe.labels = fusion::default_labels(probe.n_classes);
  try {
    probe.validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  return config;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::string item;
  for (char c : text + ",") {
    if (c == ',') {
      if (!item.empty()) items.push_back(item);
      item.clear();
    } else if (c != ' ') {
      item += c;
    }
  }
  return items;
}

struct Globals {
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string config;
  std::string log_level = "info";
};

void setup_logging(std::ostream& err, const std::string& level) {
  auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err, true);
  auto logger = std::make_shared<spdlog::logger>("aiva", std::move(sink));
  logger->set_pattern("[%H:%M:%S.%e] [%l] %v");
  const auto parsed = spdlog::level::from_str(level);
  if (parsed == spdlog::level::off && level != "off") throw UsageError("unknown log level \"" + level + "\"");
  logger->set_level(parsed);
  spdlog::set_default_logger(std::move(logger));
}

// Logging is pointed at the caller's stream only for the duration of a run.
class LoggerScope {
 public:
  LoggerScope() : previous_(spdlog::default_logger()) {}
  ~LoggerScope() { spdlog::set_default_logger(previous_); }
  LoggerScope(const LoggerScope&) = delete;
  LoggerScope& operator=(const LoggerScope&) = delete;

 private:
  std::shared_ptr<spdlog::logger> previous_;
};

json config_file(const Globals& g) { return g.config.empty() ? json::object() : read_json_file(g.config); }

// ---------------------------------------------------------------- gen-data

struct GenDataArgs {
  std::string spec, out;
  json flags = json::object();
};

int cmd_gen_data(const Globals& g, GenDataArgs& a, std::ostream& out, std::ostream& err) {
  json effective = data::SynthSpec{};
  if (!g.config.empty()) effective.merge_patch(expand_overlap(read_json_file(g.config)));
  if (!a.spec.empty()) effective.merge_patch(expand_overlap(read_json_file(a.spec)));
  json flags = expand_overlap(a.flags);
  if (g.seed_given) flags["seed"] = g.seed;
  effective.merge_patch(flags);
  const auto spec = resolve<data::SynthSpec>(effective);
  echo(err, "gen-data", json{{"spec", spec}, {"out", a.out}});

  const auto result = data::synth_generate(spec);
  const fs::path dir = a.out;
  write_splits(result.records, dir);
  const json report{{"spec", spec}, {"report", result.report}};
  write_text(dir / "report.json", report.dump(2) + "\n");
  out << report.dump(2) << std::endl;
  return kExitOk;
}

// ------------------------------------------------------------------- train

struct TrainArgs {
  std::string data, out, init_from;
  json flags = json::object();
};

int cmd_train(const Globals& g, TrainArgs& a, std::ostream& out, std::ostream& err) {
  json flags = a.flags;
  if (g.seed_given) flags["seed"] = g.seed;
  json effective;
  const auto config = resolve_train_config(config_file(g), flags, effective);
  echo(err, "train", json{{"train", effective}, {"data", a.data}, {"out", a.out}, {"init_from", a.init_from}});

  const Splits splits = load_splits(a.data);
  check_label_space(splits.train, config.model.n_classes, "training data");
  check_label_space(splits.val, config.model.n_classes, "validation data");
  train::Checkpoint warm;
  train::TrainOptions options;
  if (!a.init_from.empty()) {
    warm = train::load_checkpoint(a.init_from);
    options.warm_start = &warm;
  }
  const auto result = train::train(config, splits.train, splits.val, options);
  const fs::path dir = a.out;
  train::save_checkpoint(result.checkpoint, dir / "model.ckpt");
  train::write_history_csv(result.history, dir / "history.csv");
  write_text(dir / "config.json", result.checkpoint.metadata.train_config.dump(2) + "\n");

  json summary{{"checkpoint", (dir / "model.ckpt").string()},
               {"history", (dir / "history.csv").string()},
               {"epochs", result.history.size()},
               {"final_loss", result.history.back().loss_total}};
  if (result.history.back().val_accuracy) summary["val_accuracy"] = *result.history.back().val_accuracy;
  if (options.warm_start) summary["warm_started"] = result.warm_started.size();
  out << summary.dump(2) << std::endl;
  return kExitOk;
}

// -------------------------------------------------------------------- eval

struct EvalArgs {
  std::string checkpoint, data, split;
};

int cmd_eval(const Globals&, EvalArgs& a, std::ostream& out, std::ostream& err) {
  if (!a.split.empty()) {
    try {
      data::parse_split(a.split);
    } catch (const ValueError& e) {
      throw UsageError(e.what());
    }
  }
  echo(err, "eval", json{{"checkpoint", a.checkpoint}, {"data", a.data}, {"split", a.split}});
  const auto ckpt = train::load_checkpoint(a.checkpoint);
  data::Dataset records;
  if (fs::is_directory(a.data)) {
    const Splits s = load_splits(a.data);
    const std::string split = a.split.empty() ? "test" : a.split;
    records = split == "train" ? s.train : split == "val" ? s.val : s.test;
  } else {
    records = data::load_jsonl(a.data);
    if (!a.split.empty()) records = data::filter_split(records, data::parse_split(a.split));
  }
  check_label_space(records, ckpt.config.n_classes, "evaluation data");
  const auto metrics = train::evaluate(ckpt, records);
  json j = metrics;
  j["records"] = records.size();
  j["labels"] = ckpt.config.labels;
  out << j.dump(2) << std::endl;
  return kExitOk;
}

// ------------------------------------------------------------------ ablate

struct AblateArgs {
  std::string data, out, variants = "full,no_caf,no_cmft,no_scl", seeds, lambda_grid;
  json flags = json::object();
};

int cmd_ablate(const Globals& g, AblateArgs& a, std::ostream& out, std::ostream& err) {
  json effective;
  const auto config = resolve_train_config(config_file(g), a.flags, effective);
  std::vector<std::uint64_t> seeds;
  std::vector<train::Variant> variants;
  std::vector<double> lambdas;
  try {
    if (a.seeds.empty()) {
      seeds = {g.seed, g.seed + 1, g.seed + 2};
    } else {
      for (const auto& s : split_list(a.seeds)) seeds.push_back(std::stoull(s));
    }
    for (const auto& v : split_list(a.variants)) variants.push_back(train::parse_variant(v));
    for (const auto& l : split_list(a.lambda_grid)) lambdas.push_back(std::stod(l));
  } catch (const ValueError& e) {
    throw UsageError(e.what());
  } catch (const std::logic_error& e) {
    throw UsageError(std::string("malformed list value: ") + e.what());
  }
  if (seeds.empty()) throw UsageError("--seeds must list at least one seed");
  echo(err, "ablate",
       json{{"train", effective}, {"data", a.data}, {"seeds", seeds}, {"variants", split_list(a.variants)},
            {"lambda_grid", lambdas}, {"out", a.out}});

  const Splits splits = load_splits(a.data);
  const data::Dataset& eval_set = splits.test.empty() ? splits.val : splits.test;
  if (eval_set.empty()) throw ValueError("ablate: no test or validation records to score");
  check_label_space(splits.train, config.model.n_classes, "training data");
  check_label_space(eval_set, config.model.n_classes, "evaluation data");
  const auto table = lambdas.empty() ? train::run_ablation(config, splits.train, eval_set, variants, seeds)
                                     : train::run_lambda_sweep(config, splits.train, eval_set, lambdas, seeds);
  const std::string csv = train::ablation_csv(table);
  if (!a.out.empty()) write_text(a.out, csv);
  out << csv << std::flush;
  return kExitOk;
}

// ------------------------------------------------------------------- infer

struct InferArgs {
  std::string checkpoint, text, image;
};

int cmd_infer(const Globals&, InferArgs& a, std::ostream& out, std::ostream& err) {
  echo(err, "infer", json{{"checkpoint", a.checkpoint}, {"text", a.text}, {"image", a.image}});
  const auto ckpt = train::load_checkpoint(a.checkpoint);
  const auto model = train::model_from_checkpoint(ckpt);
  const auto& cfg = model.config();
  const data::RawImage image = a.image.empty() ? data::placeholder_image(cfg.image_height, cfg.image_width, cfg.channels)
                                               : data::read_image_file(a.image);
  const auto p = model.predict(train::prepare_input(a.text, image, ckpt.vocab, cfg));
  const std::string sentiment = cfg.labels[static_cast<std::size_t>(p.label)];
  json j{{"sentiment", sentiment}, {"label_id", p.label}, {"probabilities", p.probabilities}};
  try {
    j["expression"] = agent::to_string(agent::ExpressionMap::for_labels(cfg.labels).map(sentiment));
  } catch (const ValueError&) {
    j["expression"] = nullptr;
  }
  out << j.dump(2) << std::endl;
  return kExitOk;
}

// ------------------------------------------------------------- import-mvsa

struct ImportArgs {
  std::string dir, out;
  bool inline_images = false;
};

int cmd_import(const Globals& g, ImportArgs& a, std::ostream& out, std::ostream& err) {
  data::ImportOptions options{g.seed, a.inline_images};
  echo(err, "import-mvsa",
       json{{"dir", a.dir}, {"out", a.out}, {"seed", options.seed}, {"inline_images", options.inline_images}});
  const auto result = data::import_mvsa(a.dir, options);
  const fs::path dir = a.out;
  write_splits(result.records, dir);
  const json report = result.report;
  write_text(dir / "report.json", report.dump(2) + "\n");
  out << report.dump(2) << std::endl;
  return kExitOk;
}

// ------------------------------------------------------------------- serve

struct ServeArgs {
  std::string checkpoint, bind, templ, sessions;
  std::string llm_mode, llm_endpoint, llm_model, llm_api_key;
  long llm_timeout_ms = 30000;
  std::size_t max_turns = 200;
};

int cmd_serve(const Globals&, ServeArgs& a, std::ostream& out, std::ostream& err) {
  agent::BackendConfig backend = agent::BackendConfig::from_env();
  if (!a.llm_mode.empty()) backend.mode = a.llm_mode;
  if (!a.llm_endpoint.empty()) backend.http.endpoint = a.llm_endpoint;
  if (!a.llm_model.empty()) backend.http.model = a.llm_model;
  if (!a.llm_api_key.empty()) backend.http.api_key = a.llm_api_key;
  backend.http.timeout = std::chrono::milliseconds(a.llm_timeout_ms);
  const std::string checkpoint = a.checkpoint.empty() ? env_or("AIVA_CHECKPOINT", "") : a.checkpoint;
  const std::string bind_text = a.bind.empty() ? env_or("AIVA_BIND_ADDR", "127.0.0.1:8080") : a.bind;
  if (checkpoint.empty()) throw UsageError("serve needs --checkpoint or AIVA_CHECKPOINT");
  if (backend.mode != "stub" && backend.mode != "http") throw UsageError("--llm-mode must be stub or http");
  if (backend.mode == "http" && backend.http.endpoint.empty()) {
    throw UsageError("http mode needs --llm-endpoint or AIVA_LLM_ENDPOINT");
  }
  agent::BindAddress bind;
  try {
    bind = agent::parse_bind_address(bind_text);
  } catch (const ValueError& e) {
    throw UsageError(e.what());
  }
  echo(err, "serve",
       json{{"checkpoint", checkpoint},
            {"bind", bind.host + ":" + std::to_string(bind.port)},
            {"template", a.templ},
            {"sessions", a.sessions},
            {"max_turns", a.max_turns},
            {"llm", {{"mode", backend.mode},
                     {"endpoint", backend.http.endpoint},
                     {"model", backend.http.model},
                     {"api_key", backend.http.api_key.empty() ? "" : "<set>"},
                     {"timeout_ms", a.llm_timeout_ms}}}});

  const auto ckpt = train::load_checkpoint(checkpoint);
  auto prompt = a.templ.empty() ? epe::default_template(ckpt.config.labels) : epe::load_template(a.templ);
  agent::AgentService service(ckpt, std::move(prompt), agent::make_backend(backend), {a.max_turns});
  if (!a.sessions.empty() && fs::exists(a.sessions)) service.sessions().load(a.sessions);

  // Signals are taken synchronously so shutdown runs outside a handler.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  sigset_t previous;
  pthread_sigmask(SIG_BLOCK, &signals, &previous);
  agent::HttpServer server(service);
  const int port = server.bind(bind);
  server.start();
  out << json{{"listening", bind.host + ":" + std::to_string(port)}, {"checkpoint_id", service.checkpoint_id()}}.dump()
      << std::endl;
  int received = 0;
  sigwait(&signals, &received);
  spdlog::info("signal {} received, shutting down", received);
  server.stop();
  pthread_sigmask(SIG_SETMASK, &previous, nullptr);
  if (!a.sessions.empty()) service.sessions().save(a.sessions);
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"AIVA multimodal sentiment companion", "aiva"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option_function<std::uint64_t>(
      "--seed",
      [&g](const std::uint64_t& s) {
        g.seed = s;
        g.seed_given = true;
      },
      "Seed for every random choice");
  app.add_option("--config", g.config, "JSON file with configuration defaults");
  app.add_option("--log-level", g.log_level, "trace, debug, info, warn, error or off");

  GenDataArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-data", "Generate a synthetic image-text sentiment dataset");
  gen_cmd->add_option("--spec", gen.spec, "Synthetic dataset spec (JSON)");
  gen_cmd->add_option("--out", gen.out, "Output directory")->required();
  json_flag<std::size_t>(gen_cmd, "--classes", gen.flags, {"classes"}, "Number of classes");
  json_flag<std::size_t>(gen_cmd, "--samples-per-class", gen.flags, {"samples_per_class"}, "Records per class");
  json_flag<std::size_t>(gen_cmd, "--image-size", gen.flags, {"image_size"}, "Image side length");
  json_flag<std::size_t>(gen_cmd, "--channels", gen.flags, {"channels"}, "1 or 3");
  json_flag<double>(gen_cmd, "--noise", gen.flags, {"noise"}, "Pixel noise std");
  json_flag<double>(gen_cmd, "--overlap", gen.flags, {"overlap"}, "Sets both overlap probabilities");
  json_flag<double>(gen_cmd, "--text-overlap", gen.flags, {"text_overlap"}, "Keyword leakage probability");
  json_flag<double>(gen_cmd, "--visual-overlap", gen.flags, {"visual_overlap"}, "Blob misplacement probability");

  TrainArgs tr;
  auto* train_cmd = app.add_subcommand("train", "Train a model and write a checkpoint");
  train_cmd->add_option("--data", tr.data, "Dataset directory or JSONL file")->required();
  train_cmd->add_option("--out", tr.out, "Output directory")->required();
  train_cmd->add_option("--init-from", tr.init_from, "Checkpoint to warm start from");
  add_training_flags(train_cmd, tr.flags);

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "Score a checkpoint on a dataset");
  eval_cmd->add_option("--checkpoint", ev.checkpoint, "Checkpoint file")->required();
  eval_cmd->add_option("--data", ev.data, "Dataset directory or JSONL file")->required();
  eval_cmd->add_option("--split", ev.split, "train, val or test");

  AblateArgs ab;
  auto* ablate_cmd = app.add_subcommand("ablate", "Compare model variants over several seeds");
  ablate_cmd->add_option("--data", ab.data, "Dataset directory or JSONL file")->required();
  ablate_cmd->add_option("--out", ab.out, "CSV output file");
  ablate_cmd->add_option("--variants", ab.variants, "Comma separated: full,no_caf,no_cmft,no_scl");
  ablate_cmd->add_option("--seeds", ab.seeds, "Comma separated seeds (default: seed, seed+1, seed+2)");
  ablate_cmd->add_option("--lambda-grid", ab.lambda_grid, "Comma separated lambda values; sweeps lambda instead");
  add_training_flags(ablate_cmd, ab.flags);

  InferArgs inf;
  auto* infer_cmd = app.add_subcommand("infer", "Classify one image-text pair");
  infer_cmd->add_option("--checkpoint", inf.checkpoint, "Checkpoint file")->required();
  infer_cmd->add_option("--text", inf.text, "Text")->required();
  infer_cmd->add_option("--image", inf.image, "PNG or JPEG file (default: gray placeholder)");

  ImportArgs imp;
  auto* import_cmd = app.add_subcommand("import-mvsa", "Convert an MVSA directory to JSONL");
  import_cmd->add_option("--dir", imp.dir, "MVSA directory")->required();
  import_cmd->add_option("--out", imp.out, "Output directory")->required();
  import_cmd->add_flag("--inline-images", imp.inline_images, "Embed images as base64");

  ServeArgs sv;
  auto* serve_cmd = app.add_subcommand("serve", "Run the chat service");
  serve_cmd->add_option("--checkpoint", sv.checkpoint, "Checkpoint file (default: AIVA_CHECKPOINT)");
  serve_cmd->add_option("--bind", sv.bind, "host:port (default: AIVA_BIND_ADDR or 127.0.0.1:8080)");
  serve_cmd->add_option("--template", sv.templ, "Prompt template JSON");
  serve_cmd->add_option("--sessions", sv.sessions, "Session file loaded at start and saved at shutdown");
  serve_cmd->add_option("--max-turns", sv.max_turns, "Turns kept per session");
  serve_cmd->add_option("--llm-mode", sv.llm_mode, "stub or http (default: AIVA_LLM_MODE or stub)");
  serve_cmd->add_option("--llm-endpoint", sv.llm_endpoint, "Chat completion URL (default: AIVA_LLM_ENDPOINT)");
  serve_cmd->add_option("--llm-model", sv.llm_model, "Model name (default: AIVA_LLM_MODEL)");
  serve_cmd->add_option("--llm-api-key", sv.llm_api_key, "Bearer token (default: AIVA_LLM_API_KEY)");
  serve_cmd->add_option("--llm-timeout-ms", sv.llm_timeout_ms, "Backend timeout in milliseconds");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  LoggerScope logger_scope;
  try {
    setup_logging(err, g.log_level);
    if (gen_cmd->parsed()) return cmd_gen_data(g, gen, out, err);
    if (train_cmd->parsed()) return cmd_train(g, tr, out, err);
    if (eval_cmd->parsed()) return cmd_eval(g, ev, out, err);
    if (ablate_cmd->parsed()) return cmd_ablate(g, ab, out, err);
    if (infer_cmd->parsed()) return cmd_infer(g, inf, out, err);
    if (import_cmd->parsed()) return cmd_import(g, imp, out, err);
    if (serve_cmd->parsed()) return cmd_serve(g, sv, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << std::endl;
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << std::endl;
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace aiva::cli
