// Copyright 2026 The AIVA Authors
// SPDX-License-Identifier: Apache-2.0

#include "aiva/training/checkpoint.hpp"

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <unordered_map>

#include "aiva/error.hpp"

namespace aiva::train {
namespace {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

constexpr char kMagic[4] = {'M', 'S', 'P', 'N'};
constexpr std::size_t kPrefix = 12;  // magic + version + header length
constexpr std::size_t kTrailer = 4;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

std::uint32_t crc_of(const std::uint8_t* data, std::size_t n) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in chunks for very large blobs.
  while (n > 0) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(n, 1u << 30));
    crc = crc32(crc, data, chunk);
    data += chunk;
    n -= chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

}  // namespace

void to_json(nlohmann::json& j, const TrainingMetadata& m) {
  j = nlohmann::json{{"epoch", m.epoch},
                     {"seed", m.seed},
                     {"loss_total", m.loss_total},
                     {"loss_cls", m.loss_cls},
                     {"loss_z2s", m.loss_z2s},
                     {"loss_s2z", m.loss_s2z},
                     {"train_config", m.train_config}};
}

void from_json(const nlohmann::json& j, TrainingMetadata& m) {
  m.epoch = j.value("epoch", std::size_t{0});
  m.seed = j.value("seed", std::uint64_t{0});
  m.loss_total = j.value("loss_total", 0.0);
  m.loss_cls = j.value("loss_cls", 0.0);
  m.loss_z2s = j.value("loss_z2s", 0.0);
  m.loss_s2z = j.value("loss_s2z", 0.0);
  m.train_config = j.value("train_config", nlohmann::json::object());
}

Checkpoint make_checkpoint(const fusion::Mspn<float>& model, const enc::Vocabulary& vocab, TrainingMetadata metadata) {
  if (vocab.size() != model.config().vocab_size) {
    throw ValueError("checkpoint: vocabulary has " + std::to_string(vocab.size()) + " tokens but the model expects " +
                     std::to_string(model.config().vocab_size));
  }
  Checkpoint ckpt;
  ckpt.config = model.config();
  ckpt.vocab = vocab;
  ckpt.metadata = std::move(metadata);
  for (const num::Parameter<float>* p : model.parameters()) {
    ckpt.tensors.push_back(NamedTensor{p->name, p->value.shape(), p->value.storage()});
  }
  return ckpt;
}

std::vector<std::string> copy_matching(const Checkpoint& ckpt, fusion::Mspn<float>& model) {
  std::unordered_map<std::string, const NamedTensor*> by_name;
  for (const NamedTensor& t : ckpt.tensors) by_name.emplace(t.name, &t);
  std::vector<std::string> copied;
  for (num::Parameter<float>* p : model.parameters()) {
    auto it = by_name.find(p->name);
    if (it == by_name.end() || it->second->shape != p->value.shape()) continue;
    p->value = num::Tensor<float>(it->second->shape, it->second->data);
    copied.push_back(p->name);
  }
  return copied;
}

fusion::Mspn<float> model_from_checkpoint(const Checkpoint& ckpt) {
  fusion::Mspn<float> model(ckpt.config, 0);
  const auto params = model.parameters();
  const auto copied = copy_matching(ckpt, model);
  if (copied.size() != params.size() || ckpt.tensors.size() != params.size()) {
    for (const num::Parameter<float>* p : params) {
      if (std::find(copied.begin(), copied.end(), p->name) == copied.end()) {
        throw FormatError("checkpoint lacks parameter " + p->name + " " + num::shape_str(p->value.shape()));
      }
    }
    throw FormatError("checkpoint holds " + std::to_string(ckpt.tensors.size()) + " tensors, model has " +
                      std::to_string(params.size()) + " parameters");
  }
  return model;
}

std::vector<std::uint8_t> serialize_checkpoint(const Checkpoint& ckpt) {
  nlohmann::json manifest = nlohmann::json::array();
  std::size_t offset = 0;
  for (const NamedTensor& t : ckpt.tensors) {
    if (num::shape_numel(t.shape) != t.data.size()) throw ShapeError("checkpoint: tensor " + t.name + " size mismatch");
    manifest.push_back({{"name", t.name}, {"shape", t.shape}, {"offset", offset}, {"count", t.data.size()}});
    offset += t.data.size() * sizeof(float);
  }
  nlohmann::json header{{"config", ckpt.config},
                        {"vocab", ckpt.vocab.tokens()},
                        {"metadata", ckpt.metadata},
                        {"tensors", manifest}};
  const std::string header_text = header.dump();

  std::vector<std::uint8_t> out;
  out.reserve(kPrefix + header_text.size() + offset + kTrailer);
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  put_u32(out, kCheckpointVersion);
  put_u32(out, static_cast<std::uint32_t>(header_text.size()));
  out.insert(out.end(), header_text.begin(), header_text.end());
  for (const NamedTensor& t : ckpt.tensors) {
    const auto* bytes = reinterpret_cast<const std::uint8_t*>(t.data.data());
    out.insert(out.end(), bytes, bytes + t.data.size() * sizeof(float));
  }
  put_u32(out, crc_of(out.data(), out.size()));
  return out;
}

Checkpoint parse_checkpoint(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw FormatError("not a checkpoint (bad magic)");
  }
  if (bytes.size() < kPrefix + kTrailer) throw ChecksumError("checkpoint truncated");
  const std::uint32_t version = get_u32(bytes.data() + 4);
  if (version != kCheckpointVersion) {
    throw VersionError("checkpoint format version " + std::to_string(version) + " is not supported (expected " +
                       std::to_string(kCheckpointVersion) + ")");
  }
  const std::size_t body = bytes.size() - kTrailer;
  if (crc_of(bytes.data(), body) != get_u32(bytes.data() + body)) {
    throw ChecksumError("checkpoint checksum mismatch (file truncated or corrupted)");
  }
  const std::uint32_t header_len = get_u32(bytes.data() + 8);
  if (kPrefix + header_len > body) throw FormatError("checkpoint header overruns the file");

  Checkpoint ckpt;
  const std::size_t blob_start = kPrefix + header_len;
  const std::size_t blob_size = body - blob_start;
  try {
    const auto header = nlohmann::json::parse(bytes.begin() + kPrefix, bytes.begin() + static_cast<std::ptrdiff_t>(blob_start));
    ckpt.config = header.at("config").get<fusion::ModelConfig>();
    ckpt.vocab = enc::Vocabulary::from_tokens(header.at("vocab").get<std::vector<std::string>>());
    ckpt.metadata = header.at("metadata").get<TrainingMetadata>();
    for (const auto& entry : header.at("tensors")) {
      NamedTensor t;
      t.name = entry.at("name").get<std::string>();
      t.shape = entry.at("shape").get<num::Shape>();
      const auto offset = entry.at("offset").get<std::size_t>();
      const auto count = entry.at("count").get<std::size_t>();
      if (count != num::shape_numel(t.shape) || offset + count * sizeof(float) > blob_size) {
        throw FormatError("checkpoint tensor " + t.name + " has an inconsistent manifest entry");
      }
      t.data.resize(count);
      std::memcpy(t.data.data(), bytes.data() + blob_start + offset, count * sizeof(float));
      ckpt.tensors.push_back(std::move(t));
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("checkpoint header is malformed: ") + e.what());
  }
  return ckpt;
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  const auto bytes = serialize_checkpoint(ckpt);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write checkpoint " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing checkpoint " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_checkpoint(bytes);
}

std::string checkpoint_id(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kTrailer) throw ChecksumError("checkpoint truncated");
  char buf[9];
  std::snprintf(buf, sizeof(buf), "%08x", get_u32(bytes.data() + bytes.size() - kTrailer));
  return buf;
}

}  // namespace aiva::train
