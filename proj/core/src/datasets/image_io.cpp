// Copyright 2026 The AIVA Authors
// SPDX-License-Identifier: Apache-2.0

#include "aiva/datasets/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <fstream>
#include <iterator>

#include <jpeglib.h>

#include "aiva/error.hpp"

namespace aiva::data {
namespace {

constexpr std::string_view kBase64Alphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

RawImage from_bytes(std::size_t h, std::size_t w, std::size_t c, const std::uint8_t* src) {
  RawImage img{h, w, c, std::vector<float>(h * w * c)};
  for (std::size_t i = 0; i < img.pixels.size(); ++i) img.pixels[i] = static_cast<float>(src[i]) / 255.0f;
  return img;
}

RawImage decode_png(std::span<const std::uint8_t> bytes) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    throw FormatError(std::string("png decode failed: ") + image.message);
  }
  const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
  image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
    png_image_free(&image);
    throw FormatError(std::string("png decode failed: ") + image.message);
  }
  return from_bytes(image.height, image.width, color ? 3 : 1, buffer.data());
}

struct JpegErrorManager {
  jpeg_error_mgr base;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

void jpeg_error_exit(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->jump, 1);
}

RawImage decode_jpeg(std::span<const std::uint8_t> bytes) {
  jpeg_decompress_struct cinfo{};
  JpegErrorManager err{};
  cinfo.err = jpeg_std_error(&err.base);
  err.base.error_exit = jpeg_error_exit;
  std::vector<std::uint8_t> buffer;
  std::size_t h = 0, w = 0, c = 0;
  if (setjmp(err.jump)) {
    jpeg_destroy_decompress(&cinfo);
    throw FormatError(std::string("jpeg decode failed: ") + err.message);
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = cinfo.num_components == 1 ? JCS_GRAYSCALE : JCS_RGB;
  jpeg_start_decompress(&cinfo);
  h = cinfo.output_height;
  w = cinfo.output_width;
  c = static_cast<std::size_t>(cinfo.output_components);
  buffer.resize(h * w * c);
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = buffer.data() + static_cast<std::size_t>(cinfo.output_scanline) * w * c;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return from_bytes(h, w, c, buffer.data());
}

float sample_bilinear(const RawImage& img, double y, double x, std::size_t ch) {
  const double fy = std::clamp(y, 0.0, static_cast<double>(img.height - 1));
  const double fx = std::clamp(x, 0.0, static_cast<double>(img.width - 1));
  const auto y0 = static_cast<std::size_t>(fy), x0 = static_cast<std::size_t>(fx);
  const std::size_t y1 = std::min(y0 + 1, img.height - 1), x1 = std::min(x0 + 1, img.width - 1);
  const double ty = fy - static_cast<double>(y0), tx = fx - static_cast<double>(x0);
  auto at = [&](std::size_t yy, std::size_t xx) {
    return static_cast<double>(img.pixels[(yy * img.width + xx) * img.channels + ch]);
  };
  const double top = at(y0, x0) * (1 - tx) + at(y0, x1) * tx;
  const double bottom = at(y1, x0) * (1 - tx) + at(y1, x1) * tx;
  return static_cast<float>(top * (1 - ty) + bottom * ty);
}

}  // namespace

void RawImage::validate() const {
  if (height == 0 || width == 0 || (channels != 1 && channels != 3)) {
    throw ValueError("image must be non-empty with 1 or 3 channels, got " + std::to_string(height) + "x" +
                     std::to_string(width) + "x" + std::to_string(channels));
  }
  if (pixels.size() != height * width * channels) {
    throw ValueError("image pixel count " + std::to_string(pixels.size()) + " does not match " +
                     std::to_string(height) + "x" + std::to_string(width) + "x" + std::to_string(channels));
  }
  for (float v : pixels) {
    if (!(v >= 0.0f && v <= 1.0f)) throw ValueError("image pixel values must lie in [0, 1]");
  }
}

RawImage decode_image_bytes(std::span<const std::uint8_t> bytes) {
  static constexpr std::array<std::uint8_t, 8> kPngMagic = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  if (bytes.size() >= 8 && std::equal(kPngMagic.begin(), kPngMagic.end(), bytes.begin())) return decode_png(bytes);
  if (bytes.size() >= 3 && bytes[0] == 0xFF && bytes[1] == 0xD8 && bytes[2] == 0xFF) return decode_jpeg(bytes);
  throw FormatError("unrecognized image format (expected PNG or JPEG)");
}

RawImage read_image_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open image " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return decode_image_bytes(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::vector<std::uint8_t> encode_png(const RawImage& image) {
  image.validate();
  std::vector<std::uint8_t> raw(image.pixels.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    raw[i] = static_cast<std::uint8_t>(std::lround(std::clamp(image.pixels[i], 0.0f, 1.0f) * 255.0f));
  }
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(image.width);
  png.height = static_cast<png_uint_32>(image.height);
  png.format = image.channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&png, nullptr, &size, 0, raw.data(), 0, nullptr)) {
    throw FormatError(std::string("png encode failed: ") + png.message);
  }
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&png, out.data(), &size, 0, raw.data(), 0, nullptr)) {
    throw FormatError(std::string("png encode failed: ") + png.message);
  }
  out.resize(size);
  return out;
}

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
    out += kBase64Alphabet[(v >> 18) & 63];
    out += kBase64Alphabet[(v >> 12) & 63];
    out += kBase64Alphabet[(v >> 6) & 63];
    out += kBase64Alphabet[v & 63];
  }
  if (i < bytes.size()) {
    std::uint32_t v = bytes[i] << 16;
    if (i + 1 < bytes.size()) v |= bytes[i + 1] << 8;
    out += kBase64Alphabet[(v >> 18) & 63];
    out += kBase64Alphabet[(v >> 12) & 63];
    out += i + 1 < bytes.size() ? kBase64Alphabet[(v >> 6) & 63] : '=';
    out += '=';
  }
  return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
  std::array<int, 256> lookup;
  lookup.fill(-1);
  for (std::size_t i = 0; i < kBase64Alphabet.size(); ++i) lookup[static_cast<unsigned char>(kBase64Alphabet[i])] = static_cast<int>(i);
  // data: URLs are accepted as a convenience for browser clients.
  if (text.starts_with("data:")) {
    const auto comma = text.find(',');
    if (comma == std::string_view::npos) throw FormatError("base64: malformed data URL");
    text.remove_prefix(comma + 1);
  }
  std::vector<std::uint8_t> out;
  std::uint32_t acc = 0;
  int bits = 0;
  std::size_t padding = 0;
  for (char ch : text) {
    if (ch == '=') {
      ++padding;
      continue;
    }
    if (ch == '\n' || ch == '\r' || ch == ' ') continue;
    const int v = lookup[static_cast<unsigned char>(ch)];
    if (v < 0 || padding > 0) throw FormatError("base64: invalid character");
    acc = (acc << 6) | static_cast<std::uint32_t>(v);
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      out.push_back(static_cast<std::uint8_t>((acc >> bits) & 0xFF));
    }
  }
  if (padding > 2) throw FormatError("base64: invalid padding");
  return out;
}

RawImage fit_image(const RawImage& image, std::size_t height, std::size_t width, std::size_t channels) {
  image.validate();
  if (channels != 1 && channels != 3) throw ValueError("fit_image: channels must be 1 or 3");
  RawImage converted = image;
  if (image.channels != channels) {
    converted.channels = channels;
    converted.pixels.assign(image.height * image.width * channels, 0.0f);
    for (std::size_t p = 0; p < image.height * image.width; ++p) {
      if (channels == 1) {
        const float* rgb = &image.pixels[p * 3];
        converted.pixels[p] = std::clamp(0.299f * rgb[0] + 0.587f * rgb[1] + 0.114f * rgb[2], 0.0f, 1.0f);
      } else {
        std::fill_n(&converted.pixels[p * 3], 3, image.pixels[p]);
      }
    }
  }
  if (converted.height == height && converted.width == width) return converted;

  RawImage out{height, width, channels, std::vector<float>(height * width * channels)};
  const double sy = static_cast<double>(converted.height) / static_cast<double>(height);
  const double sx = static_cast<double>(converted.width) / static_cast<double>(width);
  for (std::size_t y = 0; y < height; ++y)
    for (std::size_t x = 0; x < width; ++x)
      for (std::size_t c = 0; c < channels; ++c) {
        out.pixels[(y * width + x) * channels + c] =
            sample_bilinear(converted, (static_cast<double>(y) + 0.5) * sy - 0.5, (static_cast<double>(x) + 0.5) * sx - 0.5, c);
      }
  return out;
}

RawImage placeholder_image(std::size_t height, std::size_t width, std::size_t channels, float level) {
  return RawImage{height, width, channels, std::vector<float>(height * width * channels, level)};
}

}  // namespace aiva::data
