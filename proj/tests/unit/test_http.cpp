// Copyright 2026 The AIVA Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>
#include <httplib.h>
#include <nlohmann/json.hpp>

#include "aiva/agent/http_server.hpp"
#include "test_support.hpp"

namespace aiva::agent {
namespace {

using nlohmann::json;

class ScriptedBackend : public LlmBackend {
 public:
  explicit ScriptedBackend(int status) : status_(status) {}
  std::string complete(const std::string&) override {
    throw BackendError("scripted failure", status_, status_ == 0 || status_ >= 500);
  }
  std::string name() const override { return "scripted"; }

 private:
  int status_;
};

class HttpTest : public ::testing::Test {
 protected:
  void start(std::unique_ptr<LlmBackend> backend = std::make_unique<StubBackend>()) {
    const auto ckpt = testing::tiny_checkpoint();
    service_ = std::make_unique<AgentService>(ckpt, epe::default_template(ckpt.config.labels), std::move(backend));
    server_ = std::make_unique<HttpServer>(*service_);
    port_ = server_->bind({"127.0.0.1", 0});
    server_->start();
    client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
  }
  void TearDown() override {
    if (server_) server_->stop();
  }

  httplib::Result post(const std::string& path, const json& body) {
    return client_->Post(path, body.dump(), "application/json");
  }

  std::unique_ptr<AgentService> service_;
  std::unique_ptr<HttpServer> server_;
  std::unique_ptr<httplib::Client> client_;
  int port_ = 0;
};

TEST_F(HttpTest, HealthReportsCheckpoint) {
  start();
  const auto res = client_->Get("/healthz");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  const json j = json::parse(res->body);
  EXPECT_EQ(j.at("status"), "ok");
  EXPECT_EQ(j.at("checkpoint_id"), service_->checkpoint_id());
  EXPECT_EQ(res->get_header_value("Access-Control-Allow-Origin"), "*");
}

TEST_F(HttpTest, SessionRoutes) {
  start();
  auto res = client_->Post("/sessions");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 201);
  const std::string id = json::parse(res->body).at("session_id");

  res = post("/sessions/" + id + "/chat", {{"text", "w3 w4"}});
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  json chat = json::parse(res->body);
  EXPECT_EQ(chat.at("turn_index"), 1);
  EXPECT_EQ(chat.at("probabilities").size(), 3u);
  res = post("/sessions/" + id + "/chat", {{"text", "w5"}, {"image_png_base64", nullptr}});
  ASSERT_TRUE(res);
  EXPECT_EQ(json::parse(res->body).at("turn_index"), 2);

  res = client_->Get("/sessions/" + id);
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(json::parse(res->body).at("turns").size(), 4u);

  res = client_->Post("/sessions/" + id + "/reset");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_TRUE(json::parse(res->body).at("turns").empty());

  res = client_->Delete("/sessions/" + id);
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  res = client_->Get("/sessions/" + id);
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 404);
  EXPECT_EQ(json::parse(res->body).at("code"), "not_found");
}

TEST_F(HttpTest, BadRequests) {
  start();
  auto res = client_->Post("/sessions/s/chat", "{not json", "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 400);
  res = post("/sessions/s/chat", {{"message", "hi"}});
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 400);
  const json err = json::parse(res->body);
  EXPECT_EQ(err.at("code"), "bad_request");
  EXPECT_EQ(err.at("retryable"), false);
  res = post("/sessions/s/chat", {{"text", ""}});
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 400);
  res = client_->Get("/no/such/route");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 404);
}

TEST_F(HttpTest, RetryableBackendFailureIs503) {
  start(std::make_unique<ScriptedBackend>(0));
  const auto res = post("/sessions/s/chat", {{"text", "w3"}});
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 503);
  const json err = json::parse(res->body);
  EXPECT_EQ(err.at("code"), "backend_error");
  EXPECT_EQ(err.at("retryable"), true);
  EXPECT_TRUE(service_->sessions().get("s").turns.empty());
}

TEST_F(HttpTest, PermanentBackendFailureIs502) {
  start(std::make_unique<ScriptedBackend>(401));
  const auto res = post("/sessions/s/chat", {{"text", "w3"}});
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 502);
  EXPECT_EQ(json::parse(res->body).at("retryable"), false);
}

TEST_F(HttpTest, CorsPreflight) {
  start();
  const auto res = client_->Options("/sessions/x/chat");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 204);
  EXPECT_EQ(res->get_header_value("Access-Control-Allow-Origin"), "*");
  EXPECT_NE(res->get_header_value("Access-Control-Allow-Methods").find("POST"), std::string::npos);
}

TEST(BindAddress, Parsing) {
  EXPECT_EQ(parse_bind_address("0.0.0.0:9000").host, "0.0.0.0");
  EXPECT_EQ(parse_bind_address("0.0.0.0:9000").port, 9000);
  EXPECT_EQ(parse_bind_address(":81").host, "127.0.0.1");
  EXPECT_EQ(parse_bind_address("8081").port, 8081);
  EXPECT_THROW(parse_bind_address("host:http"), ValueError);
  EXPECT_THROW(parse_bind_address("host:70000"), ValueError);
}

}  // namespace
}  // namespace aiva::agent
