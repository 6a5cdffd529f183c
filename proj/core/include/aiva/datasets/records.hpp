// Copyright 2026 The AIVA Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "aiva/datasets/image_io.hpp"

namespace aiva::data {

/// Inline base64 PNG (or JPEG) bytes.
struct EncodedImage {
  std::string base64;
  bool operator==(const EncodedImage&) const = default;
};

/// File reference; relative paths resolve against the JSONL file's directory.
struct ImagePath {
  std::string path;
  bool operator==(const ImagePath&) const = default;
};

using ImageSource = std::variant<RawImage, EncodedImage, ImagePath>;

enum class Split { kTrain, kVal, kTest };

std::string to_string(Split s);
Split parse_split(const std::string& s);

struct ExampleRecord {
  std::string id;
  std::string text;
  ImageSource image;
  std::int32_t label = 0;
  Split split = Split::kTrain;

  bool operator==(const ExampleRecord&) const = default;
};

using Dataset = std::vector<ExampleRecord>;

/// One record per line:
///   {"id", "text", "label", "split", "image": {"type": "raw", "height",
///    "width", "channels", "data": [...]} | {"type": "png_base64", "data"}
///    | {"type": "path", "path"}}
/// With `n_classes`, labels must fall in [0, n_classes). Errors carry the
/// 1-based line number.
Dataset load_jsonl(const std::filesystem::path& path, std::optional<std::size_t> n_classes = std::nullopt);
void save_jsonl(const Dataset& records, const std::filesystem::path& path);

Dataset filter_split(const Dataset& records, Split split);

/// Decodes the record's image, resolving paths against `base_dir`.
RawImage resolve_image(const ImageSource& image, const std::filesystem::path& base_dir = {});

/// Throws ValueError unless every label is in [0, n_classes) and ids are unique.
void validate_dataset(const Dataset& records, std::size_t n_classes);

/// Number of classes implied by the labels (max + 1); 0 for an empty set.
std::size_t label_space(const Dataset& records);

}  // namespace aiva::data
