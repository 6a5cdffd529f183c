// Copyright 2026 The AIVA Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <string>

#include "aiva/agent/service.hpp"

namespace aiva::agent {

struct BindAddress {
  std::string host = "127.0.0.1";
  int port = 8080;
};

/// "host:port", ":port" or "port".
BindAddress parse_bind_address(const std::string& text);

/// JSON API over an AgentService:
///   POST   /sessions                 → {session_id}
///   POST   /sessions/{id}/chat       {text, image_png_base64?} → ChatResponse
///   GET    /sessions/{id}            → transcript
///   POST   /sessions/{id}/reset      → transcript (empty)
///   DELETE /sessions/{id}            → {deleted}
///   GET    /healthz                  → {status, checkpoint_id}
/// Errors are {error, code, retryable}. Responses allow any CORS origin.
class HttpServer {
 public:
  explicit HttpServer(AgentService& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Port 0 picks a free port. Returns the bound port.
  int bind(const BindAddress& address);
  /// Serves until stop(); requires bind().
  void run();
  /// run() on a background thread.
  void start();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace aiva::agent
