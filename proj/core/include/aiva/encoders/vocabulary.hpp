// Copyright 2026 The AIVA Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace aiva::enc {

/// Token ↔ id map with dense ids. Ids 0..2 are reserved for [PAD], [UNK]
/// and [CLS]; regular tokens follow in lexicographic order.
class Vocabulary {
 public:
  static constexpr std::int32_t kPad = 0;
  static constexpr std::int32_t kUnk = 1;
  static constexpr std::int32_t kCls = 2;
  static constexpr std::size_t kReserved = 3;

  Vocabulary();

  /// Keeps every word that occurs at least `min_freq` times across `texts`.
  static Vocabulary build(std::span<const std::string> texts, std::size_t min_freq = 1);

  /// Tokens listed in id order, starting with the three reserved tokens.
  static Vocabulary from_tokens(std::vector<std::string> tokens);

  /// Reads "token<TAB>id" lines.
  static Vocabulary load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  std::int32_t id(std::string_view token) const;
  const std::string& token(std::int32_t id) const;
  std::size_t size() const noexcept { return tokens_.size(); }
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }
  bool contains(std::string_view token) const;

  bool operator==(const Vocabulary& other) const { return tokens_ == other.tokens_; }

 private:
  void index();

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::int32_t> ids_;
};

/// Lowercases ASCII letters and splits on whitespace and ASCII punctuation.
/// Non-ASCII bytes are kept inside words.
std::vector<std::string> split_words(std::string_view text);

struct TokenSequence {
  std::vector<std::int32_t> ids;   // length max_len, [CLS] first
  std::vector<std::uint8_t> mask;  // 1 for real tokens (including [CLS])
  std::size_t length() const;      // number of unmasked positions
};

/// [CLS] + word ids (UNK for unknown words), truncated to max_len and padded
/// with [PAD].
TokenSequence tokenize(std::string_view text, const Vocabulary& vocab, std::size_t max_len);

}  // namespace aiva::enc
