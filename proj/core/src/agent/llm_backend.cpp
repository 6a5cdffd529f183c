// Copyright 2026 The AIVA Authors
// SPDX-License-Identifier: Apache-2.0

#include "aiva/agent/llm_backend.hpp"

#include <cstdlib>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "aiva/epe/prompt.hpp"

namespace aiva::agent {
namespace {

std::string env_or(const char* name, std::string fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : fallback;
}

}  // namespace

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

const std::vector<std::string>& StubBackend::phrases() {
  static const std::vector<std::string> canned = {
      "Thank you for sharing that with me.",
      "I'm here with you, whatever comes next.",
      "That means a lot, and I'm glad you told me.",
      "Tell me more whenever you feel like it.",
      "Your feelings make a lot of sense.",
      "I'm listening, take all the time you need.",
  };
  return canned;
}

std::string StubBackend::complete(const std::string& prompt) {
  if (prompt.empty()) throw ValueError("prompt is empty");
  const std::string sentiment = epe::extract_sentiment(prompt).value_or("unknown");
  const auto& canned = phrases();
  return "I can sense you are feeling " + sentiment + ". " + canned[fnv1a(prompt) % canned.size()];
}

HttpChatBackend::HttpChatBackend(HttpBackendConfig config) : config_(std::move(config)) {
  if (config_.endpoint.empty()) throw ValueError("http backend requires an endpoint");
  const auto scheme = config_.endpoint.find("://");
  if (scheme == std::string::npos) throw ValueError("endpoint must start with http:// or https://");
  const auto slash = config_.endpoint.find('/', scheme + 3);
  base_ = config_.endpoint.substr(0, slash);
  path_ = slash == std::string::npos ? "/v1/chat/completions" : config_.endpoint.substr(slash);
}

std::string HttpChatBackend::complete(const std::string& prompt) {
  if (prompt.empty()) throw ValueError("prompt is empty");
  httplib::Client client(base_);
  client.set_connection_timeout(config_.timeout);
  client.set_read_timeout(config_.timeout);
  client.set_write_timeout(config_.timeout);
  if (!config_.api_key.empty()) client.set_bearer_token_auth(config_.api_key);

  const nlohmann::json body{{"model", config_.model},
                            {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})}};
  const auto res = client.Post(path_, body.dump(), "application/json");
  if (!res) {
    throw BackendError("language model unreachable at " + config_.endpoint + ": " + httplib::to_string(res.error()), 0,
                       true);
  }
  if (res->status >= 400) {
    const bool retryable = res->status == 408 || res->status == 429 || res->status >= 500;
    throw BackendError("language model returned HTTP " + std::to_string(res->status), res->status, retryable);
  }
  try {
    const auto reply = nlohmann::json::parse(res->body);
    return reply.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw BackendError(std::string("malformed language model response: ") + e.what(), res->status, false);
  }
}

BackendConfig BackendConfig::from_env() {
  BackendConfig c;
  c.mode = env_or("AIVA_LLM_MODE", c.mode);
  c.http.endpoint = env_or("AIVA_LLM_ENDPOINT", "");
  c.http.api_key = env_or("AIVA_LLM_API_KEY", "");
  c.http.model = env_or("AIVA_LLM_MODEL", "");
  return c;
}

std::unique_ptr<LlmBackend> make_backend(const BackendConfig& config) {
  if (config.mode == "stub") return std::make_unique<StubBackend>();
  if (config.mode == "http") return std::make_unique<HttpChatBackend>(config.http);
  throw ValueError("unknown backend mode \"" + config.mode + "\" (expected stub or http)");
}

}  // namespace aiva::agent
