// Copyright 2026 The AIVA Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <memory>
#include <string>
#include <vector>

#include "aiva/error.hpp"

namespace aiva::agent {

/// Failure talking to the language model. `status` is the HTTP status, or 0
/// when no response arrived.
class BackendError : public Error {
 public:
  BackendError(const std::string& what, int status, bool retryable)
      : Error(what), status_(status), retryable_(retryable) {}
  int status() const noexcept { return status_; }
  bool retryable() const noexcept { return retryable_; }

 private:
  int status_;
  bool retryable_;
};

class LlmBackend {
 public:
  virtual ~LlmBackend() = default;
  virtual std::string complete(const std::string& prompt) = 0;
  virtual std::string name() const = 0;
};

/// Deterministic offline backend. The reply names the sentiment found on the
/// prompt's sentiment line and adds a canned phrase chosen by an FNV-1a hash
/// of the prompt bytes.
class StubBackend : public LlmBackend {
 public:
  std::string complete(const std::string& prompt) override;
  std::string name() const override { return "stub"; }

  static const std::vector<std::string>& phrases();
};

std::uint64_t fnv1a(std::string_view bytes);

struct HttpBackendConfig {
  std::string endpoint;  // e.g. http://localhost:8000/v1/chat/completions
  std::string model;
  std::string api_key;
  std::chrono::milliseconds timeout{30000};
};

/// OpenAI-style chat-completion client: POSTs {model, messages} and returns
/// choices[0].message.content.
class HttpChatBackend : public LlmBackend {
 public:
  explicit HttpChatBackend(HttpBackendConfig config);
  std::string complete(const std::string& prompt) override;
  std::string name() const override { return "http"; }

 private:
  HttpBackendConfig config_;
  std::string base_;
  std::string path_;
};

struct BackendConfig {
  std::string mode = "stub";  // stub | http
  HttpBackendConfig http;

  /// Reads AIVA_LLM_MODE, AIVA_LLM_ENDPOINT, AIVA_LLM_API_KEY, AIVA_LLM_MODEL.
  static BackendConfig from_env();
};

/// Throws ValueError for an unknown mode or http mode without an endpoint.
std::unique_ptr<LlmBackend> make_backend(const BackendConfig& config);

}  // namespace aiva::agent
