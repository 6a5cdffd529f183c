// Copyright 2026 The AIVA Authors
// SPDX-License-Identifier: Apache-2.0

#include "aiva/agent/session_store.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <random>

#include <nlohmann/json.hpp>

#include "aiva/error.hpp"

namespace aiva::agent {
namespace {

std::string random_id() {
  thread_local std::mt19937_64 rng{std::random_device{}()};
  char buf[33];
  std::snprintf(buf, sizeof(buf), "%016llx%016llx", static_cast<unsigned long long>(rng()),
                static_cast<unsigned long long>(rng()));
  return buf;
}

void check_id(const std::string& id) {
  if (id.empty() || id.size() > 128) throw ValueError("session id must be 1 to 128 characters");
  for (char c : id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' || c == '_';
    if (!ok) throw ValueError("session id may only contain letters, digits, '-' and '_'");
  }
}

}  // namespace

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void to_json(nlohmann::json& j, const ChatSession& s) {
  j = nlohmann::json{{"session_id", s.id},
                     {"turns", s.turns},
                     {"exchanges", s.exchanges},
                     {"created_at", s.created_at},
                     {"last_active", s.last_active}};
}

void from_json(const nlohmann::json& j, ChatSession& s) {
  s.id = j.at("session_id").get<std::string>();
  s.turns = j.at("turns").get<std::vector<epe::Turn>>();
  s.exchanges = j.value("exchanges", std::size_t{0});
  s.created_at = j.value("created_at", std::string());
  s.last_active = j.value("last_active", s.created_at);
}

SessionStore::SessionStore(std::size_t max_turns) : max_turns_(max_turns) {
  if (max_turns_ < 2) throw ValueError("sessions must keep at least 2 turns");
}

std::shared_ptr<SessionStore::Entry> SessionStore::find(const std::string& id) const {
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw NotFoundError("session \"" + id + "\" not found");
  return it->second;
}

std::string SessionStore::create() {
  std::lock_guard lock(mutex_);
  std::string id;
  do {
    id = random_id();
  } while (sessions_.contains(id));
  auto entry = std::make_shared<Entry>();
  entry->session.id = id;
  entry->session.created_at = entry->session.last_active = utc_timestamp();
  sessions_.emplace(id, std::move(entry));
  return id;
}

void SessionStore::ensure(const std::string& id) {
  check_id(id);
  std::lock_guard lock(mutex_);
  if (sessions_.contains(id)) return;
  auto entry = std::make_shared<Entry>();
  entry->session.id = id;
  entry->session.created_at = entry->session.last_active = utc_timestamp();
  sessions_.emplace(id, std::move(entry));
}

bool SessionStore::contains(const std::string& id) const {
  std::lock_guard lock(mutex_);
  return sessions_.contains(id);
}

ChatSession SessionStore::get(const std::string& id) const {
  auto entry = find(id);
  std::lock_guard lock(entry->mutex);
  return entry->session;
}

std::vector<epe::Turn> SessionStore::history(const std::string& id) const {
  auto entry = find(id);
  std::lock_guard lock(entry->mutex);
  return entry->session.turns;
}

std::size_t SessionStore::append_exchange(const std::string& id, epe::Turn user, epe::Turn agent) {
  auto entry = find(id);
  std::lock_guard lock(entry->mutex);
  auto& turns = entry->session.turns;
  turns.push_back(std::move(user));
  turns.push_back(std::move(agent));
  if (turns.size() > max_turns_) turns.erase(turns.begin(), turns.begin() + static_cast<std::ptrdiff_t>(turns.size() - max_turns_));
  entry->session.last_active = utc_timestamp();
  return ++entry->session.exchanges;
}

void SessionStore::reset(const std::string& id) {
  auto entry = find(id);
  std::lock_guard lock(entry->mutex);
  entry->session.turns.clear();
  entry->session.exchanges = 0;
  entry->session.last_active = utc_timestamp();
}

void SessionStore::remove(const std::string& id) {
  std::lock_guard lock(mutex_);
  if (sessions_.erase(id) == 0) throw NotFoundError("session \"" + id + "\" not found");
}

std::size_t SessionStore::size() const {
  std::lock_guard lock(mutex_);
  return sessions_.size();
}

void SessionStore::save(const std::filesystem::path& path) const {
  std::vector<std::shared_ptr<Entry>> entries;
  {
    std::lock_guard lock(mutex_);
    for (const auto& [_, e] : sessions_) entries.push_back(e);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write sessions to " + path.string());
  for (const auto& e : entries) {
    std::lock_guard lock(e->mutex);
    out << nlohmann::json(e->session).dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) << '\n';
  }
}

void SessionStore::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read sessions from " + path.string());
  std::string line;
  std::size_t line_no = 0;
  std::map<std::string, std::shared_ptr<Entry>> loaded;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      auto entry = std::make_shared<Entry>();
      entry->session = nlohmann::json::parse(line).get<ChatSession>();
      check_id(entry->session.id);
      loaded[entry->session.id] = std::move(entry);
    } catch (const std::exception& e) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  std::lock_guard lock(mutex_);
  for (auto& [id, e] : loaded) sessions_[id] = std::move(e);
}

}  // namespace aiva::agent
