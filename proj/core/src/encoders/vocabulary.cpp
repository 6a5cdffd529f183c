// Copyright 2026 The AIVA Authors
// SPDX-License-Identifier: Apache-2.0

#include "aiva/encoders/vocabulary.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>

#include "aiva/error.hpp"

namespace aiva::enc {
namespace {

const std::vector<std::string>& reserved_tokens() {
  static const std::vector<std::string> tokens = {"[PAD]", "[UNK]", "[CLS]"};
  return tokens;
}

bool is_separator(unsigned char c) {
  return c < 0x80 && !((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9'));
}

}  // namespace

Vocabulary::Vocabulary() : tokens_(reserved_tokens()) { index(); }

void Vocabulary::index() {
  ids_.clear();
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (!ids_.emplace(tokens_[i], static_cast<std::int32_t>(i)).second) {
      throw ValueError("vocabulary: duplicate token '" + tokens_[i] + "'");
    }
  }
}

Vocabulary Vocabulary::build(std::span<const std::string> texts, std::size_t min_freq) {
  std::map<std::string, std::size_t> counts;
  for (const std::string& text : texts)
    for (std::string& w : split_words(text)) ++counts[std::move(w)];
  Vocabulary v;
  for (const auto& [word, count] : counts)
    if (count >= std::max<std::size_t>(min_freq, 1)) v.tokens_.push_back(word);
  v.index();
  return v;
}

Vocabulary Vocabulary::from_tokens(std::vector<std::string> tokens) {
  const auto& reserved = reserved_tokens();
  if (tokens.size() < kReserved || !std::equal(reserved.begin(), reserved.end(), tokens.begin())) {
    throw ValueError("vocabulary: ids 0..2 must be [PAD], [UNK], [CLS]");
  }
  Vocabulary v;
  v.tokens_ = std::move(tokens);
  v.index();
  return v;
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open vocabulary file " + path.string());
  std::vector<std::pair<std::int64_t, std::string>> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto tab = line.rfind('\t');
    if (tab == std::string::npos) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": expected token<TAB>id");
    }
    try {
      entries.emplace_back(std::stoll(line.substr(tab + 1)), line.substr(0, tab));
    } catch (const std::exception&) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": bad id");
    }
  }
  std::sort(entries.begin(), entries.end());
  std::vector<std::string> tokens;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].first != static_cast<std::int64_t>(i)) {
      throw FormatError(path.string() + ": ids are not dense from 0");
    }
    tokens.push_back(std::move(entries[i].second));
  }
  return from_tokens(std::move(tokens));
}

void Vocabulary::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write vocabulary file " + path.string());
  for (std::size_t i = 0; i < tokens_.size(); ++i) out << tokens_[i] << '\t' << i << '\n';
}

std::int32_t Vocabulary::id(std::string_view token) const {
  auto it = ids_.find(std::string(token));
  return it == ids_.end() ? kUnk : it->second;
}

const std::string& Vocabulary::token(std::int32_t id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= tokens_.size()) {
    throw ValueError("vocabulary: id " + std::to_string(id) + " out of range");
  }
  return tokens_[static_cast<std::size_t>(id)];
}

bool Vocabulary::contains(std::string_view token) const { return ids_.contains(std::string(token)); }

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> words;
  std::string current;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (is_separator(c)) {
      if (!current.empty()) words.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back((c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : ch);
    }
  }
  if (!current.empty()) words.push_back(std::move(current));
  return words;
}

std::size_t TokenSequence::length() const {
  return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), std::uint8_t{1}));
}

TokenSequence tokenize(std::string_view text, const Vocabulary& vocab, std::size_t max_len) {
  if (max_len == 0) throw ValueError("tokenize: max_len must be at least 1");
  TokenSequence seq;
  seq.ids.assign(max_len, Vocabulary::kPad);
  seq.mask.assign(max_len, 0);
  seq.ids[0] = Vocabulary::kCls;
  seq.mask[0] = 1;
  std::size_t pos = 1;
  for (const std::string& w : split_words(text)) {
    if (pos >= max_len) break;
    seq.ids[pos] = vocab.id(w);
    seq.mask[pos] = 1;
    ++pos;
  }
  return seq;
}

}  // namespace aiva::enc
