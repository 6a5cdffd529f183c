// Copyright 2026 The AIVA Authors
// SPDX-License-Identifier: Apache-2.0

#include "aiva/agent/expression.hpp"

#include <array>
#include <utility>

#include "aiva/error.hpp"

namespace aiva::agent {
namespace {

constexpr std::array<std::pair<Expression, const char*>, 8> kNames = {{
    {Expression::kHappy, "happy"},
    {Expression::kSad, "sad"},
    {Expression::kAngry, "angry"},
    {Expression::kFear, "fear"},
    {Expression::kLove, "love"},
    {Expression::kBored, "bored"},
    {Expression::kCalm, "calm"},
    {Expression::kNeutral, "neutral"},
}};

std::string lower(std::string s) {
  for (char& c : s)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return s;
}

}  // namespace

std::string to_string(Expression e) {
  for (const auto& [value, name] : kNames)
    if (value == e) return name;
  return "neutral";
}

Expression parse_expression(const std::string& name) {
  for (const auto& [value, n] : kNames)
    if (name == n) return value;
  throw ValueError("unknown expression \"" + name + "\"");
}

ExpressionMap::ExpressionMap(std::map<std::string, Expression> entries) : entries_(std::move(entries)) {}

ExpressionMap ExpressionMap::for_labels(const std::vector<std::string>& labels) {
  static const std::map<std::string, Expression> polarity = {
      {"positive", Expression::kHappy}, {"neutral", Expression::kNeutral}, {"negative", Expression::kSad}};
  std::map<std::string, Expression> entries;
  for (const std::string& label : labels) {
    const std::string key = lower(label);
    if (auto it = polarity.find(key); it != polarity.end()) {
      entries.emplace(label, it->second);
      continue;
    }
    try {
      entries.emplace(label, parse_expression(key));
    } catch (const ValueError&) {
      throw ValueError("sentiment label \"" + label + "\" has no avatar expression");
    }
  }
  return ExpressionMap(std::move(entries));
}

Expression ExpressionMap::map(const std::string& label) const {
  auto it = entries_.find(label);
  if (it == entries_.end()) throw ValueError("unknown sentiment label \"" + label + "\"");
  return it->second;
}

}  // namespace aiva::agent
