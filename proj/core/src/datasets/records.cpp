// Copyright 2026 The AIVA Authors
// SPDX-License-Identifier: Apache-2.0

#include "aiva/datasets/records.hpp"

#include <fstream>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "aiva/error.hpp"

namespace aiva::data {
namespace {

using nlohmann::json;

json image_to_json(const ImageSource& image) {
  if (const auto* raw = std::get_if<RawImage>(&image)) {
    return json{{"type", "raw"},
                {"height", raw->height},
                {"width", raw->width},
                {"channels", raw->channels},
                {"data", raw->pixels}};
  }
  if (const auto* enc = std::get_if<EncodedImage>(&image)) return json{{"type", "png_base64"}, {"data", enc->base64}};
  return json{{"type", "path"}, {"path", std::get<ImagePath>(image).path}};
}

ImageSource image_from_json(const json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw ValueError("\"image\" must be an object");
  const std::string type = j.at("type").get<std::string>();
  if (type == "raw") {
    RawImage raw{j.at("height").get<std::size_t>(), j.at("width").get<std::size_t>(),
                 j.at("channels").get<std::size_t>(), j.at("data").get<std::vector<float>>()};
    raw.validate();
    return raw;
  }
  if (type == "png_base64") {
    EncodedImage enc{j.at("data").get<std::string>()};
    decode_image_bytes(base64_decode(enc.base64)).validate();
    return enc;
  }
  if (type == "path") {
    std::filesystem::path p = j.at("path").get<std::string>();
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    read_image_file(p).validate();
    return ImagePath{p.string()};
  }
  throw ValueError("unknown image type \"" + type + "\"");
}

}  // namespace

std::string to_string(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kVal: return "val";
    case Split::kTest: return "test";
  }
  return "train";
}

Split parse_split(const std::string& s) {
  if (s == "train") return Split::kTrain;
  if (s == "val") return Split::kVal;
  if (s == "test") return Split::kTest;
  throw ValueError("unknown split \"" + s + "\" (expected train, val or test)");
}

Dataset load_jsonl(const std::filesystem::path& path, std::optional<std::size_t> n_classes) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset " + path.string());
  const std::filesystem::path base_dir = path.parent_path();
  Dataset out;
  std::unordered_map<std::string, std::size_t> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no) + ": ";
    try {
      const json j = json::parse(line);
      ExampleRecord rec;
      rec.id = j.at("id").get<std::string>();
      rec.text = j.at("text").get<std::string>();
      rec.label = j.at("label").get<std::int32_t>();
      rec.split = parse_split(j.value("split", std::string("train")));
      rec.image = image_from_json(j.at("image"), base_dir);
      if (rec.label < 0 || (n_classes && static_cast<std::size_t>(rec.label) >= *n_classes)) {
        throw ValueError("label " + std::to_string(rec.label) + " out of range" +
                         (n_classes ? " [0, " + std::to_string(*n_classes) + ")" : std::string()));
      }
      if (auto [it, inserted] = seen.emplace(rec.id, line_no); !inserted) {
        throw ValueError("duplicate id \"" + rec.id + "\" (first seen on line " + std::to_string(it->second) + ")");
      }
      out.push_back(std::move(rec));
    } catch (const json::exception& e) {
      throw FormatError(where + "invalid record: " + e.what());
    } catch (const Error& e) {
      throw FormatError(where + e.what());
    }
  }
  return out;
}

void save_jsonl(const Dataset& records, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write dataset " + path.string());
  for (const ExampleRecord& r : records) {
    const json j{{"id", r.id},
                 {"text", r.text},
                 {"label", r.label},
                 {"split", to_string(r.split)},
                 {"image", image_to_json(r.image)}};
    out << j.dump(-1, ' ', false, json::error_handler_t::replace) << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

Dataset filter_split(const Dataset& records, Split split) {
  Dataset out;
  for (const ExampleRecord& r : records)
    if (r.split == split) out.push_back(r);
  return out;
}

RawImage resolve_image(const ImageSource& image, const std::filesystem::path& base_dir) {
  if (const auto* raw = std::get_if<RawImage>(&image)) return *raw;
  if (const auto* enc = std::get_if<EncodedImage>(&image)) return decode_image_bytes(base64_decode(enc->base64));
  std::filesystem::path p = std::get<ImagePath>(image).path;
  if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
  return read_image_file(p);
}

void validate_dataset(const Dataset& records, std::size_t n_classes) {
  std::unordered_set<std::string> ids;
  for (const ExampleRecord& r : records) {
    if (r.label < 0 || static_cast<std::size_t>(r.label) >= n_classes) {
      throw ValueError("record \"" + r.id + "\" has label " + std::to_string(r.label) + " but the model has " +
                       std::to_string(n_classes) + " classes");
    }
    if (!ids.insert(r.id).second) throw ValueError("duplicate id \"" + r.id + "\"");
  }
}

std::size_t label_space(const Dataset& records) {
  std::int32_t max_label = -1;
  for (const ExampleRecord& r : records) max_label = std::max(max_label, r.label);
  return static_cast<std::size_t>(max_label + 1);
}

}  // namespace aiva::data
