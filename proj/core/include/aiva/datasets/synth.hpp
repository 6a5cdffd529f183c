// Copyright 2026 The AIVA Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "aiva/datasets/records.hpp"

namespace aiva::data {

/// Synthetic image-text sentiment data. Each class owns a keyword inventory
/// and a grid cell in which its image blob sits.
struct SynthSpec {
  std::size_t classes = 3;
  std::size_t samples_per_class = 200;
  std::size_t image_size = 32;
  std::size_t channels = 1;
  double noise = 0.1;           // pixel noise std
  double text_overlap = 0.1;    // chance each keyword comes from another class
  double visual_overlap = 0.1;  // chance the blob sits in another class's cell
  std::uint64_t seed = 0;

  void validate() const;
};

/// Accepts the field names above plus "overlap", which sets both overlaps.
void to_json(nlohmann::json& j, const SynthSpec& s);
void from_json(const nlohmann::json& j, SynthSpec& s);

struct SynthReport {
  std::size_t records = 0;
  std::size_t train = 0;
  std::size_t val = 0;
  std::size_t test = 0;
  std::vector<std::string> labels;
  // Nearest-centroid classifier on raw pixels, centroids from the train split,
  // scored on every record.
  double pixel_centroid_accuracy = 0.0;
};

void to_json(nlohmann::json& j, const SynthReport& r);

struct SynthResult {
  Dataset records;
  SynthReport report;
};

/// Balanced and deterministic per seed. Each class is split 70/15/15
/// (train and val floored, the remainder to test).
SynthResult synth_generate(const SynthSpec& spec);

/// Keywords that mark class k.
std::vector<std::string> class_keywords(std::size_t classes, std::size_t k);

/// Accuracy of a nearest-centroid classifier over flattened pixels.
double nearest_centroid_accuracy(const Dataset& fit, const Dataset& score, std::size_t n_classes);

}  // namespace aiva::data
