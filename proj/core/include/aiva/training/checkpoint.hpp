// Copyright 2026 The AIVA Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "aiva/encoders/vocabulary.hpp"
#include "aiva/fusion/mspn.hpp"

namespace aiva::train {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct NamedTensor {
  std::string name;
  num::Shape shape;
  std::vector<float> data;
  bool operator==(const NamedTensor&) const = default;
};

struct TrainingMetadata {
  std::size_t epoch = 0;
  std::uint64_t seed = 0;
  double loss_total = 0.0;
  double loss_cls = 0.0;
  double loss_z2s = 0.0;
  double loss_s2z = 0.0;
  nlohmann::json train_config = nlohmann::json::object();
};

void to_json(nlohmann::json& j, const TrainingMetadata& m);
void from_json(const nlohmann::json& j, TrainingMetadata& m);

/// File layout, little endian:
///   "MSPN" | u32 version | u32 header length | JSON header | f32 blob | u32 CRC32
/// The header carries the model config, vocabulary, metadata and a tensor
/// manifest (name, shape, byte offset into the blob). The CRC covers every
/// preceding byte.
struct Checkpoint {
  fusion::ModelConfig config;
  enc::Vocabulary vocab;
  TrainingMetadata metadata;
  std::vector<NamedTensor> tensors;
};

Checkpoint make_checkpoint(const fusion::Mspn<float>& model, const enc::Vocabulary& vocab, TrainingMetadata metadata);

/// Rebuilds the model; every parameter must be present with matching shape.
fusion::Mspn<float> model_from_checkpoint(const Checkpoint& ckpt);

/// Copies every tensor whose name and shape match a model parameter and
/// returns the names that were copied.
std::vector<std::string> copy_matching(const Checkpoint& ckpt, fusion::Mspn<float>& model);

std::vector<std::uint8_t> serialize_checkpoint(const Checkpoint& ckpt);

/// Throws FormatError on bad magic, VersionError on an unsupported version
/// and ChecksumError on truncation or corruption.
Checkpoint parse_checkpoint(std::span<const std::uint8_t> bytes);

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Stored CRC of a serialized checkpoint as 8 hex digits.
std::string checkpoint_id(std::span<const std::uint8_t> bytes);

}  // namespace aiva::train
