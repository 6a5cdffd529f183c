// Copyright 2026 The AIVA Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "aiva/numerics/tensor.hpp"

namespace aiva::data {

/// Row-major H×W×C grid of intensities in [0, 1].
struct RawImage {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 0;
  std::vector<float> pixels;

  void validate() const;
  bool operator==(const RawImage&) const = default;
};

// PNG and JPEG are sniffed from the leading bytes.
RawImage decode_image_bytes(std::span<const std::uint8_t> bytes);
RawImage read_image_file(const std::filesystem::path& path);

// 8-bit PNG, gray for 1 channel, RGB for 3.
std::vector<std::uint8_t> encode_png(const RawImage& image);

std::string base64_encode(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> base64_decode(std::string_view text);

/// Converts channel count (gray <-> RGB) and resizes bilinearly so the
/// result is height×width×channels.
RawImage fit_image(const RawImage& image, std::size_t height, std::size_t width, std::size_t channels);

template <typename T>
num::Tensor<T> to_tensor(const RawImage& image) {
  image.validate();
  std::vector<T> data(image.pixels.begin(), image.pixels.end());
  return num::Tensor<T>({image.height, image.width, image.channels}, std::move(data));
}

/// Uniform gray image, used when a chat turn carries no picture.
RawImage placeholder_image(std::size_t height, std::size_t width, std::size_t channels, float level = 0.5f);

}  // namespace aiva::data
