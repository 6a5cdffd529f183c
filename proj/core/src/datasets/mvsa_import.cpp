// Copyright 2026 The AIVA Authors
// SPDX-License-Identifier: Apache-2.0

#include "aiva/datasets/mvsa_import.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <map>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "aiva/error.hpp"

namespace aiva::data {
namespace {

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::string lower(std::string s) {
  for (char& c : s)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return s;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream in(s);
  while (std::getline(in, part, sep)) parts.push_back(trim(part));
  return parts;
}

std::optional<std::filesystem::path> find_image(const std::filesystem::path& data_dir, const std::string& id) {
  for (const char* ext : {".jpg", ".jpeg", ".png", ".JPG", ".PNG"}) {
    std::filesystem::path p = data_dir / (id + ext);
    if (std::filesystem::is_regular_file(p)) return p;
  }
  return std::nullopt;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

}  // namespace

std::int32_t mvsa_label_id(const std::string& name) {
  const std::string l = lower(trim(name));
  if (l == "positive") return 0;
  if (l == "neutral") return 1;
  if (l == "negative") return 2;
  throw ValueError("unknown sentiment label \"" + name + "\"");
}

std::optional<std::int32_t> resolve_annotation(const std::string& annotation) {
  const auto parts = split(annotation, ',');
  if (parts.size() == 1) return mvsa_label_id(parts[0]);
  if (parts.size() != 2) throw ValueError("malformed annotation \"" + annotation + "\"");
  const std::int32_t text = mvsa_label_id(parts[0]);
  const std::int32_t image = mvsa_label_id(parts[1]);
  constexpr std::int32_t kNeutral = 1;
  if (text == image) return text;
  if (text == kNeutral) return image;
  if (image == kNeutral) return text;
  return std::nullopt;
}

std::optional<std::int32_t> majority_label(const std::vector<std::string>& annotations) {
  if (annotations.empty()) return std::nullopt;
  std::map<std::int32_t, std::size_t> votes;
  for (const std::string& a : annotations)
    if (auto label = resolve_annotation(a)) ++votes[*label];
  for (const auto& [label, count] : votes)
    if (2 * count > annotations.size()) return label;
  return std::nullopt;
}

void to_json(nlohmann::json& j, const ImportReport& r) {
  j = nlohmann::json{{"kept", r.kept},   {"dropped_conflict", r.dropped_conflict},
                     {"dropped_missing", r.dropped_missing},
                     {"train", r.train}, {"val", r.val},
                     {"test", r.test},   {"seed", r.seed}};
}

ImportResult import_mvsa(const std::filesystem::path& directory, const ImportOptions& options) {
  const std::filesystem::path index = directory / "labelResultAll.txt";
  std::ifstream in(index);
  if (!in) throw IoError("cannot open " + index.string());
  const std::filesystem::path data_dir = directory / "data";

  ImportResult result;
  ImportReport& rep = result.report;
  rep.seed = options.seed;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line_no == 1) continue;  // header
    const auto cols = split(line, '\t');
    if (cols.size() < 2) throw FormatError(index.string() + ":" + std::to_string(line_no) + ": expected id and labels");
    const std::string& id = cols[0];
    std::optional<std::int32_t> label;
    try {
      label = majority_label(std::vector<std::string>(cols.begin() + 1, cols.end()));
    } catch (const ValueError& e) {
      throw FormatError(index.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    if (!label) {
      ++rep.dropped_conflict;
      spdlog::debug("mvsa {}: annotators disagree, dropped", id);
      continue;
    }
    const std::filesystem::path text_path = data_dir / (id + ".txt");
    const auto image_path = find_image(data_dir, id);
    if (!image_path || !std::filesystem::is_regular_file(text_path)) {
      ++rep.dropped_missing;
      spdlog::warn("mvsa {}: missing {} file, dropped", id, image_path ? "text" : "image");
      continue;
    }
    const std::string image_bytes = read_file(*image_path);
    try {
      decode_image_bytes(std::span(reinterpret_cast<const std::uint8_t*>(image_bytes.data()), image_bytes.size()))
          .validate();
    } catch (const Error& e) {
      ++rep.dropped_missing;
      spdlog::warn("mvsa {}: unreadable image ({}), dropped", id, e.what());
      continue;
    }
    ExampleRecord rec;
    rec.id = id;
    rec.text = trim(read_file(text_path));
    rec.label = *label;
    if (options.inline_images) {
      rec.image = EncodedImage{
          base64_encode(std::span(reinterpret_cast<const std::uint8_t*>(image_bytes.data()), image_bytes.size()))};
    } else {
      rec.image = ImagePath{std::filesystem::absolute(*image_path).string()};
    }
    result.records.push_back(std::move(rec));
  }

  std::vector<std::size_t> order(result.records.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937_64 rng(options.seed);
  std::shuffle(order.begin(), order.end(), rng);
  const std::size_t n = order.size();
  rep.kept = n;
  rep.train = n * 8 / 10;
  rep.val = n / 10;
  rep.test = n - rep.train - rep.val;
  for (std::size_t pos = 0; pos < n; ++pos) {
    result.records[order[pos]].split = pos < rep.train ? Split::kTrain : pos < rep.train + rep.val ? Split::kVal : Split::kTest;
  }
  return result;
}

}  // namespace aiva::data
