// Copyright 2026 The AIVA Authors
// SPDX-License-Identifier: Apache-2.0

#include "aiva/epe/prompt.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>

#include <nlohmann/json.hpp>

#include "aiva/error.hpp"

namespace aiva::epe {
namespace {

constexpr std::string_view kMarker = "### ";

const char* kRole =
    "You are AIVA, a warm and attentive virtual companion. You listen closely, acknowledge how the user feels, "
    "and answer with kindness and honesty. Keep replies short, natural and supportive. Never dismiss or "
    "exaggerate the user's feelings.";

const char* kCot =
    "Before answering, think step by step in private: consider the detected sentiment, how the user's mood has "
    "changed over the conversation, and what response would help most. Do not reveal this reasoning. Reply with "
    "the final message to the user only.";

std::vector<FewShotExample> three_class_examples() {
  return {
      {"I finally passed my driving test today!", "positive",
       "That is wonderful news, congratulations! All that practice paid off. How are you going to celebrate?"},
      {"I'm sitting at the station waiting for the next train.", "neutral",
       "Waiting can feel long. Do you have something to read or listen to while you wait?"},
      {"My cat has been sick all week and I'm really worried.", "negative",
       "I'm so sorry, that sounds stressful. It's clear how much you care about your cat. Has a vet been able to "
       "take a look?"},
  };
}

std::vector<FewShotExample> seven_class_examples() {
  return {
      {"We just got engaged on the beach at sunset!", "Happy",
       "Congratulations to you both! What a beautiful moment to remember."},
      {"Sunday morning, tea and a quiet garden.", "Calm",
       "That sounds lovely and peaceful. Enjoy the stillness while it lasts."},
      {"I miss my grandmother so much today.", "Sad",
       "I'm really sorry. Missing someone you love can hurt a lot. Would you like to tell me about her?"},
  };
}

std::string speaker_name(Speaker s) { return s == Speaker::kUser ? "user" : "agent"; }

// Keeps user-supplied text from forging block markers or the sentiment line.
std::string neutralize(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string line(text.substr(pos, end - pos));
    if (line.starts_with(kMarker)) line = "# " + line.substr(kMarker.size());
    for (std::size_t at = line.find(kSentimentPrefix); at != std::string::npos; at = line.find(kSentimentPrefix, at)) {
      line.replace(at + kSentimentPrefix.size() - 2, 1, " -");
    }
    out += line;
    if (end == text.size()) break;
    out += '\n';
    pos = end + 1;
  }
  return out;
}

void block(std::string& out, std::string_view name) {
  if (!out.empty()) out += '\n';
  out += kMarker;
  out += name;
  out += '\n';
}

}  // namespace

void to_json(nlohmann::json& j, const PromptTemplate& t) {
  nlohmann::json examples = nlohmann::json::array();
  for (const auto& e : t.few_shot) examples.push_back({{"user", e.user}, {"sentiment", e.sentiment}, {"reply", e.reply}});
  j = nlohmann::json{{"version", t.version},
                     {"role_definition", t.role_definition},
                     {"few_shot", examples},
                     {"cot_instruction", t.cot_instruction},
                     {"history_window", t.history_window},
                     {"sentiment_labels", t.sentiment_labels}};
}

void from_json(const nlohmann::json& j, PromptTemplate& t) {
  t.version = j.value("version", std::string());
  t.role_definition = j.at("role_definition").get<std::string>();
  t.cot_instruction = j.at("cot_instruction").get<std::string>();
  const auto& window = j.at("history_window");
  if (!window.is_number_unsigned()) throw ValueError("history_window must be a nonnegative integer");
  t.history_window = window.get<std::size_t>();
  t.sentiment_labels = j.at("sentiment_labels").get<std::vector<std::string>>();
  t.few_shot.clear();
  for (const auto& e : j.value("few_shot", nlohmann::json::array())) {
    t.few_shot.push_back({e.at("user").get<std::string>(), e.at("sentiment").get<std::string>(),
                          e.at("reply").get<std::string>()});
  }
}

PromptTemplate load_template(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open template " + path.string());
  try {
    return nlohmann::json::parse(in).get<PromptTemplate>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": invalid template: " + e.what());
  }
}

void save_template(const PromptTemplate& t, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write template " + path.string());
  out << nlohmann::json(t).dump(2) << '\n';
}

PromptTemplate default_template(const std::vector<std::string>& labels) {
  PromptTemplate t;
  t.version = "aiva-epe-1";
  t.role_definition = kRole;
  t.cot_instruction = kCot;
  t.history_window = 6;
  t.sentiment_labels = labels;
  if (labels == std::vector<std::string>{"positive", "neutral", "negative"}) {
    t.few_shot = three_class_examples();
  } else if (labels == std::vector<std::string>{"Angry", "Bored", "Calm", "Fear", "Happy", "Love", "Sad"}) {
    t.few_shot = seven_class_examples();
  }
  return t;
}

void to_json(nlohmann::json& j, const Turn& t) {
  j = nlohmann::json{{"speaker", speaker_name(t.speaker)}, {"text", t.text}, {"timestamp", t.timestamp}};
  j["sentiment"] = t.sentiment ? nlohmann::json(*t.sentiment) : nlohmann::json(nullptr);
}

void from_json(const nlohmann::json& j, Turn& t) {
  const auto speaker = j.at("speaker").get<std::string>();
  if (speaker != "user" && speaker != "agent") throw ValueError("unknown speaker \"" + speaker + "\"");
  t.speaker = speaker == "user" ? Speaker::kUser : Speaker::kAgent;
  t.text = j.at("text").get<std::string>();
  t.timestamp = j.value("timestamp", std::string());
  t.sentiment.reset();
  if (j.contains("sentiment") && !j.at("sentiment").is_null()) t.sentiment = j.at("sentiment").get<std::string>();
}

std::vector<std::string> validate_template(const PromptTemplate& t, const std::vector<std::string>& class_labels) {
  std::vector<std::string> problems;
  auto blank = [](const std::string& s) { return s.find_first_not_of(" \t\r\n") == std::string::npos; };
  if (blank(t.role_definition)) problems.push_back("role_definition is empty");
  if (blank(t.cot_instruction)) problems.push_back("cot_instruction is empty");
  if (t.sentiment_labels.empty()) problems.push_back("sentiment_labels is empty");
  for (std::size_t i = 0; i < t.sentiment_labels.size(); ++i) {
    const auto& label = t.sentiment_labels[i];
    if (blank(label)) problems.push_back("sentiment_labels[" + std::to_string(i) + "] is empty");
    if (std::find(t.sentiment_labels.begin(), t.sentiment_labels.begin() + static_cast<std::ptrdiff_t>(i), label) !=
        t.sentiment_labels.begin() + static_cast<std::ptrdiff_t>(i)) {
      problems.push_back("sentiment_labels[" + std::to_string(i) + "] duplicates \"" + label + "\"");
    }
  }
  for (const auto& label : class_labels) {
    if (std::find(t.sentiment_labels.begin(), t.sentiment_labels.end(), label) == t.sentiment_labels.end()) {
      problems.push_back("class label \"" + label + "\" is missing from sentiment_labels");
    }
  }
  for (std::size_t i = 0; i < t.few_shot.size(); ++i) {
    const auto& e = t.few_shot[i];
    const std::string where = "few_shot[" + std::to_string(i) + "]";
    if (std::find(t.sentiment_labels.begin(), t.sentiment_labels.end(), e.sentiment) == t.sentiment_labels.end()) {
      problems.push_back(where + ": sentiment \"" + e.sentiment + "\" is not in the label set");
    }
    if (blank(e.user)) problems.push_back(where + ": user message is empty");
    if (blank(e.reply)) problems.push_back(where + ": reply is empty");
  }
  return problems;
}

std::string render_prompt(const PromptTemplate& t, std::span<const Turn> history, std::string_view user_msg,
                          std::string_view sentiment) {
  if (std::find(t.sentiment_labels.begin(), t.sentiment_labels.end(), sentiment) == t.sentiment_labels.end()) {
    throw ValueError("unknown sentiment label \"" + std::string(sentiment) + "\"");
  }
  std::string out;
  block(out, "ROLE");
  out += neutralize(t.role_definition);
  out += '\n';

  block(out, "EXAMPLES");
  for (std::size_t i = 0; i < t.few_shot.size(); ++i) {
    const auto& e = t.few_shot[i];
    if (i > 0) out += '\n';
    out += "Example " + std::to_string(i + 1) + "\n";
    out += "User: " + neutralize(e.user) + "\n";
    out += "Sentiment: " + e.sentiment + "\n";
    out += "Assistant: " + neutralize(e.reply) + "\n";
  }

  const std::size_t keep = std::min(history.size(), t.history_window);
  if (keep > 0) {
    block(out, "HISTORY");
    for (const Turn& turn : history.subspan(history.size() - keep)) {
      if (turn.speaker == Speaker::kUser) {
        out += "User [" + turn.sentiment.value_or("unknown") + "]: " + neutralize(turn.text) + "\n";
      } else {
        out += "Assistant: " + neutralize(turn.text) + "\n";
      }
    }
  }

  block(out, "SENTIMENT");
  out += kSentimentPrefix;
  out += sentiment;
  out += '\n';

  block(out, "USER MESSAGE");
  out += neutralize(user_msg);
  out += '\n';

  block(out, "INSTRUCTIONS");
  out += neutralize(t.cot_instruction);
  out += '\n';
  return out;
}

std::optional<std::string> extract_sentiment(std::string_view prompt) {
  std::size_t pos = 0;
  while (pos < prompt.size()) {
    const std::size_t end = std::min(prompt.find('\n', pos), prompt.size());
    const std::string_view line = prompt.substr(pos, end - pos);
    if (line.starts_with(kSentimentPrefix)) return std::string(line.substr(kSentimentPrefix.size()));
    pos = end + 1;
  }
  return std::nullopt;
}

}  // namespace aiva::epe
