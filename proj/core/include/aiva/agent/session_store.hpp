// Copyright 2026 The AIVA Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "aiva/epe/prompt.hpp"

namespace aiva::agent {

struct ChatSession {
  std::string id;
  std::vector<epe::Turn> turns;
  std::size_t exchanges = 0;  // completed chat calls since creation or reset
  std::string created_at;
  std::string last_active;
};

void to_json(nlohmann::json& j, const ChatSession& s);
void from_json(const nlohmann::json& j, ChatSession& s);

/// UTC time as 2026-01-02T03:04:05Z.
std::string utc_timestamp();

/// In-memory sessions. The map is guarded by one mutex and each session by
/// its own, so work on distinct sessions does not contend. Transcripts keep
/// at most `max_turns` turns, evicting the oldest.
class SessionStore {
 public:
  explicit SessionStore(std::size_t max_turns = 200);

  std::string create();
  /// Creates the session under `id` if it does not exist yet.
  void ensure(const std::string& id);
  bool contains(const std::string& id) const;
  ChatSession get(const std::string& id) const;  // NotFoundError when absent
  std::vector<epe::Turn> history(const std::string& id) const;
  /// Appends the turns atomically and returns the new exchange count.
  std::size_t append_exchange(const std::string& id, epe::Turn user, epe::Turn agent);
  void reset(const std::string& id);
  void remove(const std::string& id);
  std::size_t size() const;
  std::size_t max_turns() const noexcept { return max_turns_; }

  /// One JSON session per line.
  void save(const std::filesystem::path& path) const;
  void load(const std::filesystem::path& path);

 private:
  struct Entry {
    mutable std::mutex mutex;
    ChatSession session;
  };
  std::shared_ptr<Entry> find(const std::string& id) const;

  std::size_t max_turns_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
};

}  // namespace aiva::agent
