// Copyright 2026 The AIVA Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace aiva::epe {

struct FewShotExample {
  std::string user;
  std::string sentiment;
  std::string reply;
  bool operator==(const FewShotExample&) const = default;
};

struct PromptTemplate {
  std::string version;
  std::string role_definition;
  std::vector<FewShotExample> few_shot;
  std::string cot_instruction;
  std::size_t history_window = 6;
  std::vector<std::string> sentiment_labels;  // index = class id
  bool operator==(const PromptTemplate&) const = default;
};

void to_json(nlohmann::json& j, const PromptTemplate& t);
void from_json(const nlohmann::json& j, PromptTemplate& t);

PromptTemplate load_template(const std::filesystem::path& path);
void save_template(const PromptTemplate& t, const std::filesystem::path& path);

/// Shipped template for the given label set (3-class polarity or the seven
/// emotions; other label sets reuse the 3-class text without examples).
PromptTemplate default_template(const std::vector<std::string>& labels);

enum class Speaker { kUser, kAgent };

struct Turn {
  Speaker speaker = Speaker::kUser;
  std::string text;
  std::optional<std::string> sentiment;  // user turns only
  std::string timestamp;                 // not rendered
  bool operator==(const Turn&) const = default;
};

void to_json(nlohmann::json& j, const Turn& t);
void from_json(const nlohmann::json& j, Turn& t);

/// Problems found, empty when the template is usable. With `class_labels`,
/// every class label must also appear in the template's label set.
std::vector<std::string> validate_template(const PromptTemplate& t,
                                           const std::vector<std::string>& class_labels = {});

inline constexpr std::string_view kSentimentPrefix = "Detected user sentiment: ";

/// Blocks, each opened by a "### NAME" marker line:
///   ROLE, EXAMPLES, HISTORY (omitted when empty), SENTIMENT, USER MESSAGE,
///   INSTRUCTIONS.
/// History keeps the last history_window turns, oldest first; user turns are
/// annotated with their sentiment. Marker lines and the sentiment prefix are
/// neutralized inside user-supplied text.
std::string render_prompt(const PromptTemplate& t, std::span<const Turn> history, std::string_view user_msg,
                          std::string_view sentiment);

/// Label on the sentiment prefix line, if present.
std::optional<std::string> extract_sentiment(std::string_view prompt);

}  // namespace aiva::epe
