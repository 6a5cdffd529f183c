// Copyright 2026 The AIVA Authors
// SPDX-License-Identifier: Apache-2.0

#include "aiva/agent/http_server.hpp"

#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

namespace aiva::agent {
namespace {

using nlohmann::json;

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(-1, ' ', false, json::error_handler_t::replace), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& code, const std::string& message,
                bool retryable = false) {
  send_json(res, status, json{{"error", message}, {"code", code}, {"retryable", retryable}});
}

// Runs a handler and maps exceptions to error responses.
template <typename F>
void guarded(httplib::Response& res, F&& body) {
  try {
    body();
  } catch (const BackendError& e) {
    send_error(res, e.retryable() ? 503 : 502, "backend_error", e.what(), e.retryable());
  } catch (const NotFoundError& e) {
    send_error(res, 404, "not_found", e.what());
  } catch (const ValueError& e) {
    send_error(res, 400, "bad_request", e.what());
  } catch (const FormatError& e) {
    send_error(res, 400, "bad_request", e.what());
  } catch (const json::exception& e) {
    send_error(res, 400, "bad_request", std::string("invalid JSON body: ") + e.what());
  } catch (const std::exception& e) {
    spdlog::error("request failed: {}", e.what());
    send_error(res, 500, "internal", e.what());
  }
}

}  // namespace

BindAddress parse_bind_address(const std::string& text) {
  BindAddress addr;
  const auto colon = text.rfind(':');
  const std::string port = colon == std::string::npos ? text : text.substr(colon + 1);
  if (colon != std::string::npos && colon > 0) addr.host = text.substr(0, colon);
  try {
    std::size_t used = 0;
    addr.port = std::stoi(port, &used);
    if (used != port.size() || addr.port < 0 || addr.port > 65535) throw std::invalid_argument("range");
  } catch (const std::exception&) {
    throw ValueError("invalid bind address \"" + text + "\" (expected host:port)");
  }
  return addr;
}

struct HttpServer::Impl {
  AgentService& service;
  httplib::Server server;
  std::thread thread;
  bool bound = false;

  explicit Impl(AgentService& s) : service(s) { routes(); }

  void routes() {
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                {"Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS"},
                                {"Access-Control-Allow-Headers", "Content-Type"}});
    server.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

    server.Get("/healthz", [this](const httplib::Request&, httplib::Response& res) {
      send_json(res, 200, json{{"status", "ok"}, {"checkpoint_id", service.checkpoint_id()}});
    });

    server.Post("/sessions", [this](const httplib::Request&, httplib::Response& res) {
      guarded(res, [&] { send_json(res, 201, json{{"session_id", service.sessions().create()}}); });
    });

    server.Post(R"(/sessions/([A-Za-z0-9_-]+)/chat)", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const json body = json::parse(req.body);
        if (!body.is_object() || !body.contains("text") || !body.at("text").is_string()) {
          throw ValueError("body must be an object with a string \"text\"");
        }
        ChatRequest chat{body.at("text").get<std::string>(), std::nullopt};
        if (body.contains("image_png_base64") && !body.at("image_png_base64").is_null()) {
          chat.image_png_base64 = body.at("image_png_base64").get<std::string>();
        }
        send_json(res, 200, service.chat(req.matches[1], chat));
      });
    });

    server.Get(R"(/sessions/([A-Za-z0-9_-]+))", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] { send_json(res, 200, service.sessions().get(req.matches[1])); });
    });

    server.Post(R"(/sessions/([A-Za-z0-9_-]+)/reset)", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        service.sessions().reset(req.matches[1]);
        send_json(res, 200, service.sessions().get(req.matches[1]));
      });
    });

    server.Delete(R"(/sessions/([A-Za-z0-9_-]+))", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        service.sessions().remove(req.matches[1]);
        send_json(res, 200, json{{"deleted", std::string(req.matches[1])}});
      });
    });

    server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
      if (res.body.empty()) {
        send_error(res, res.status, res.status == 404 ? "not_found" : "http_error",
                   "HTTP " + std::to_string(res.status));
      }
    });
  }
};

HttpServer::HttpServer(AgentService& service) : impl_(std::make_unique<Impl>(service)) {}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const BindAddress& address) {
  const int port = address.port == 0 ? impl_->server.bind_to_any_port(address.host)
                                     : (impl_->server.bind_to_port(address.host, address.port) ? address.port : -1);
  if (port < 0) throw IoError("cannot bind " + address.host + ":" + std::to_string(address.port));
  impl_->bound = true;
  spdlog::info("listening on {}:{}", address.host, port);
  return port;
}

void HttpServer::run() {
  if (!impl_->bound) throw Error("HttpServer::run before bind");
  impl_->server.listen_after_bind();
}

void HttpServer::start() {
  if (!impl_->bound) throw Error("HttpServer::start before bind");
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

void HttpServer::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace aiva::agent
