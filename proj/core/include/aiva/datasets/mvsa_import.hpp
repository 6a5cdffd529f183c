// Copyright 2026 The AIVA Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "aiva/datasets/records.hpp"

namespace aiva::data {

/// positive → 0, neutral → 1, negative → 2.
std::int32_t mvsa_label_id(const std::string& name);

/// Collapses one annotator's "text,image" judgement to a single label:
/// equal labels stand, a neutral side defers to the other, and
/// positive against negative yields no vote. A bare label is taken as is.
std::optional<std::int32_t> resolve_annotation(const std::string& annotation);

/// Strict majority over all annotators, or nothing on conflict.
std::optional<std::int32_t> majority_label(const std::vector<std::string>& annotations);

struct ImportOptions {
  std::uint64_t seed = 0;
  // Embed the original image bytes as base64 instead of referencing the file.
  bool inline_images = false;
};

struct ImportReport {
  std::size_t kept = 0;
  std::size_t dropped_conflict = 0;
  std::size_t dropped_missing = 0;
  std::size_t train = 0;
  std::size_t val = 0;
  std::size_t test = 0;
  std::uint64_t seed = 0;
};

void to_json(nlohmann::json& j, const ImportReport& r);

struct ImportResult {
  Dataset records;
  ImportReport report;
};

/// Reads an MVSA directory: labelResultAll.txt (tab separated, header line,
/// one "text,image" column per annotator) and data/<id>.txt plus
/// data/<id>.jpg|.jpeg|.png. Kept records receive a seeded 8/1/1 split.
ImportResult import_mvsa(const std::filesystem::path& directory, const ImportOptions& options = {});

}  // namespace aiva::data
