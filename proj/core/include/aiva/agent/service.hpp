// Copyright 2026 The AIVA Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "aiva/agent/expression.hpp"
#include "aiva/agent/llm_backend.hpp"
#include "aiva/agent/session_store.hpp"
#include "aiva/datasets/image_io.hpp"
#include "aiva/epe/prompt.hpp"
#include "aiva/training/checkpoint.hpp"

namespace aiva::agent {

struct ChatRequest {
  std::string text;
  std::optional<std::string> image_png_base64;
};

struct ChatResponse {
  std::string reply;
  std::string sentiment;
  std::vector<double> probabilities;
  std::string expression;
  std::size_t turn_index = 0;  // 1 for the first exchange of a session
};

void to_json(nlohmann::json& j, const ChatResponse& r);

struct Classification {
  std::string sentiment;
  std::vector<double> probabilities;
};

struct ServiceOptions {
  std::size_t max_turns = 200;
};

/// Removes <thinking>...</thinking> blocks and surrounding whitespace.
std::string strip_thinking(const std::string& reply);

/// Chat pipeline: classify the turn, render the prompt over the session
/// history, ask the backend, then record both turns. The model is read only,
/// and no lock is held while the backend runs. A failed backend call leaves
/// the session untouched.
class AgentService {
 public:
  /// Throws ValueError when the template's labels do not cover the model's
  /// labels or a label has no expression.
  AgentService(const train::Checkpoint& checkpoint, epe::PromptTemplate prompt_template,
               std::unique_ptr<LlmBackend> backend, ServiceOptions options = {});

  /// Missing images are replaced by a uniform gray placeholder.
  Classification classify(const std::string& text, const std::optional<data::RawImage>& image) const;

  /// Creates the session if needed.
  ChatResponse chat(const std::string& session_id, const ChatRequest& request);

  SessionStore& sessions() noexcept { return sessions_; }
  const SessionStore& sessions() const noexcept { return sessions_; }
  const std::string& checkpoint_id() const noexcept { return checkpoint_id_; }
  const std::vector<std::string>& labels() const noexcept { return model_.config().labels; }
  const ExpressionMap& expressions() const noexcept { return expressions_; }
  const LlmBackend& backend() const noexcept { return *backend_; }

 private:
  fusion::Mspn<float> model_;
  enc::Vocabulary vocab_;
  epe::PromptTemplate template_;
  ExpressionMap expressions_;
  std::unique_ptr<LlmBackend> backend_;
  SessionStore sessions_;
  std::string checkpoint_id_;
};

}  // namespace aiva::agent
