// Copyright 2026 The AIVA Authors
// SPDX-License-Identifier: Apache-2.0

#include "aiva/agent/service.hpp"

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "aiva/training/trainer.hpp"

namespace aiva::agent {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  return s.substr(first, s.find_last_not_of(" \t\r\n") - first + 1);
}

std::string checked_template_problems(const epe::PromptTemplate& t, const std::vector<std::string>& labels) {
  std::string joined;
  for (const auto& p : epe::validate_template(t, labels)) joined += (joined.empty() ? "" : "; ") + p;
  return joined;
}

}  // namespace

void to_json(nlohmann::json& j, const ChatResponse& r) {
  j = nlohmann::json{{"reply", r.reply},
                     {"sentiment", r.sentiment},
                     {"probabilities", r.probabilities},
                     {"expression", r.expression},
                     {"turn_index", r.turn_index}};
}

std::string strip_thinking(const std::string& reply) {
  static constexpr std::string_view kOpen = "<thinking>";
  static constexpr std::string_view kClose = "</thinking>";
  std::string out = reply;
  for (auto open = out.find(kOpen); open != std::string::npos; open = out.find(kOpen, open)) {
    const auto close = out.find(kClose, open);
    out.erase(open, close == std::string::npos ? std::string::npos : close + kClose.size() - open);
  }
  return trim(out);
}

AgentService::AgentService(const train::Checkpoint& checkpoint, epe::PromptTemplate prompt_template,
                           std::unique_ptr<LlmBackend> backend, ServiceOptions options)
    : model_(train::model_from_checkpoint(checkpoint)),
      vocab_(checkpoint.vocab),
      template_(std::move(prompt_template)),
      expressions_(ExpressionMap::for_labels(checkpoint.config.labels)),
      backend_(std::move(backend)),
      sessions_(options.max_turns),
      checkpoint_id_(train::checkpoint_id(train::serialize_checkpoint(checkpoint))) {
  if (!backend_) throw ValueError("agent service needs a language model backend");
  if (auto problems = checked_template_problems(template_, checkpoint.config.labels); !problems.empty()) {
    throw ValueError("prompt template does not fit the checkpoint: " + problems);
  }
}

Classification AgentService::classify(const std::string& text, const std::optional<data::RawImage>& image) const {
  const auto& cfg = model_.config();
  const data::RawImage picture =
      image ? *image : data::placeholder_image(cfg.image_height, cfg.image_width, cfg.channels);
  const fusion::Prediction p = model_.predict(train::prepare_input(text, picture, vocab_, cfg));
  return Classification{cfg.labels[static_cast<std::size_t>(p.label)], p.probabilities};
}

ChatResponse AgentService::chat(const std::string& session_id, const ChatRequest& request) {
  if (trim(request.text).empty()) throw ValueError("\"text\" must not be empty");
  std::optional<data::RawImage> image;
  if (request.image_png_base64 && !request.image_png_base64->empty()) {
    image = data::decode_image_bytes(data::base64_decode(*request.image_png_base64));
  }
  sessions_.ensure(session_id);

  const Classification cls = classify(request.text, image);
  const std::vector<epe::Turn> history = sessions_.history(session_id);
  const std::string prompt = epe::render_prompt(template_, history, request.text, cls.sentiment);
  const std::string reply = strip_thinking(backend_->complete(prompt));

  const std::string now = utc_timestamp();
  epe::Turn user{epe::Speaker::kUser, request.text, cls.sentiment, now};
  epe::Turn agent{epe::Speaker::kAgent, reply, std::nullopt, now};
  ChatResponse response;
  response.turn_index = sessions_.append_exchange(session_id, std::move(user), std::move(agent));
  response.reply = reply;
  response.sentiment = cls.sentiment;
  response.probabilities = cls.probabilities;
  response.expression = to_string(expressions_.map(cls.sentiment));
  spdlog::debug("session {} turn {}: {}", session_id, response.turn_index, cls.sentiment);
  return response;
}

}  // namespace aiva::agent
