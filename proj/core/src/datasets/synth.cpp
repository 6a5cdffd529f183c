// Copyright 2026 The AIVA Authors
// SPDX-License-Identifier: Apache-2.0

#include "aiva/datasets/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>

#include <nlohmann/json.hpp>

#include "aiva/error.hpp"
#include "aiva/fusion/model_config.hpp"

namespace aiva::data {
namespace {

constexpr std::size_t kKeywordsPerText = 4;

const std::vector<std::vector<std::string>>& three_class_words() {
  static const std::vector<std::vector<std::string>> words = {
      {"happy", "great", "wonderful", "sunny", "joy", "excellent", "smile", "delight"},
      {"table", "report", "station", "routine", "schedule", "average", "street", "notice"},
      {"sad", "awful", "terrible", "broken", "lonely", "gloomy", "cry", "miserable"},
  };
  return words;
}

const std::vector<std::vector<std::string>>& seven_class_words() {
  static const std::vector<std::vector<std::string>> words = {
      {"furious", "rage", "outraged", "yelling", "hostile", "irate"},         // Angry
      {"boring", "dull", "tedious", "yawn", "monotone", "idle"},              // Bored
      {"peaceful", "serene", "quiet", "relaxed", "still", "gentle"},          // Calm
      {"scared", "afraid", "terror", "panic", "dread", "nervous"},            // Fear
      {"joyful", "cheerful", "laugh", "celebrate", "glad", "bright"},         // Happy
      {"adore", "darling", "sweetheart", "romance", "cherish", "affection"},  // Love
      {"sorrow", "tears", "grief", "lonely", "mourning", "heartbroken"},      // Sad
  };
  return words;
}

const std::vector<std::string>& filler_words() {
  static const std::vector<std::string> words = {"the", "a",    "today", "this", "my",  "photo", "with",
                                                 "at",  "we",   "it",    "is",   "was", "and",   "here"};
  return words;
}

std::size_t grid_side(std::size_t classes) {
  auto g = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(classes))));
  while (g * g < classes) ++g;
  return g;
}

void check_unit(double v, const char* field) {
  if (!(v >= 0.0 && v <= 1.0)) throw ValueError(std::string(field) + " must lie in [0, 1], got " + std::to_string(v));
}

std::size_t other_class(std::mt19937_64& rng, std::size_t classes, std::size_t k) {
  std::uniform_int_distribution<std::size_t> pick(0, classes - 2);
  const std::size_t o = pick(rng);
  return o >= k ? o + 1 : o;
}

std::string make_text(std::mt19937_64& rng, const SynthSpec& spec, std::size_t k) {
  std::bernoulli_distribution leak(spec.text_overlap);
  std::uniform_int_distribution<std::size_t> n_filler(2, 4);
  std::vector<std::string> words;
  for (std::size_t i = 0; i < kKeywordsPerText; ++i) {
    const std::size_t source = spec.classes > 1 && leak(rng) ? other_class(rng, spec.classes, k) : k;
    const auto inventory = class_keywords(spec.classes, source);
    std::uniform_int_distribution<std::size_t> pick(0, inventory.size() - 1);
    words.push_back(inventory[pick(rng)]);
  }
  const std::size_t fillers = n_filler(rng);
  std::uniform_int_distribution<std::size_t> pick_filler(0, filler_words().size() - 1);
  for (std::size_t i = 0; i < fillers; ++i) words.push_back(filler_words()[pick_filler(rng)]);
  std::shuffle(words.begin(), words.end(), rng);
  std::string text;
  for (const std::string& w : words) {
    if (!text.empty()) text += ' ';
    text += w;
  }
  return text;
}

RawImage make_image(std::mt19937_64& rng, const SynthSpec& spec, std::size_t k) {
  std::bernoulli_distribution leak(spec.visual_overlap);
  const std::size_t cell_class = spec.classes > 1 && leak(rng) ? other_class(rng, spec.classes, k) : k;
  const std::size_t g = grid_side(spec.classes);
  const double cell = static_cast<double>(spec.image_size) / static_cast<double>(g);
  const double radius = std::max(1.0, cell / 4.0);
  const auto jitter_px = static_cast<int>(std::max(1.0, std::floor(cell / 8.0)));
  std::uniform_int_distribution<int> jitter(-jitter_px, jitter_px);
  const double cy = (static_cast<double>(cell_class / g) + 0.5) * cell + jitter(rng);
  const double cx = (static_cast<double>(cell_class % g) + 0.5) * cell + jitter(rng);

  std::normal_distribution<double> noise(0.0, 1.0);
  const std::size_t n = spec.image_size;
  RawImage img{n, n, spec.channels, std::vector<float>(n * n * spec.channels)};
  for (std::size_t y = 0; y < n; ++y) {
    for (std::size_t x = 0; x < n; ++x) {
      const double dy = static_cast<double>(y) + 0.5 - cy;
      const double dx = static_cast<double>(x) + 0.5 - cx;
      const double base = dy * dy + dx * dx <= radius * radius ? 0.9 : 0.1;
      for (std::size_t c = 0; c < spec.channels; ++c) {
        const double v = spec.noise > 0.0 ? base + spec.noise * noise(rng) : base;
        // Quantized to 8-bit levels so PNG export is lossless.
        img.pixels[(y * n + x) * spec.channels + c] =
            static_cast<float>(std::round(std::clamp(v, 0.0, 1.0) * 255.0) / 255.0);
      }
    }
  }
  return img;
}

}  // namespace

void SynthSpec::validate() const {
  if (classes < 2) throw ValueError("classes must be at least 2, got " + std::to_string(classes));
  if (samples_per_class < 1) throw ValueError("samples_per_class must be at least 1");
  if (image_size < 4) throw ValueError("image_size must be at least 4, got " + std::to_string(image_size));
  if (channels != 1 && channels != 3) throw ValueError("channels must be 1 or 3, got " + std::to_string(channels));
  if (!(noise >= 0.0) || !std::isfinite(noise)) throw ValueError("noise must be nonnegative, got " + std::to_string(noise));
  check_unit(text_overlap, "text_overlap");
  check_unit(visual_overlap, "visual_overlap");
}

void to_json(nlohmann::json& j, const SynthSpec& s) {
  j = nlohmann::json{{"classes", s.classes},
                     {"samples_per_class", s.samples_per_class},
                     {"image_size", s.image_size},
                     {"channels", s.channels},
                     {"noise", s.noise},
                     {"text_overlap", s.text_overlap},
                     {"visual_overlap", s.visual_overlap},
                     {"seed", s.seed}};
}

void from_json(const nlohmann::json& j, SynthSpec& s) {
  if (!j.is_object()) throw ValueError("synthetic spec must be a JSON object");
  static const std::vector<std::string> known = {"classes",      "samples_per_class", "image_size", "channels", "noise",
                                                 "text_overlap", "visual_overlap",    "overlap",    "seed"};
  for (const auto& [key, _] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) throw ValueError("unknown spec field \"" + key + "\"");
  }
  auto read = [&](const char* key, auto& field) {
    if (!j.contains(key)) return;
    try {
      j.at(key).get_to(field);
    } catch (const nlohmann::json::exception&) {
      throw ValueError(std::string("spec field \"") + key + "\" has the wrong type");
    }
  };
  auto read_count = [&](const char* key, std::size_t& field) {
    if (j.contains(key) && j.at(key).is_number_integer() && j.at(key).get<long long>() < 0) {
      throw ValueError(std::string(key) + " must be nonnegative");
    }
    read(key, field);
  };
  read_count("classes", s.classes);
  read_count("samples_per_class", s.samples_per_class);
  read_count("image_size", s.image_size);
  read_count("channels", s.channels);
  read("noise", s.noise);
  if (j.contains("overlap")) {
    read("overlap", s.text_overlap);
    s.visual_overlap = s.text_overlap;
  }
  read("text_overlap", s.text_overlap);
  read("visual_overlap", s.visual_overlap);
  read("seed", s.seed);
}

void to_json(nlohmann::json& j, const SynthReport& r) {
  j = nlohmann::json{{"records", r.records},
                     {"train", r.train},
                     {"val", r.val},
                     {"test", r.test},
                     {"labels", r.labels},
                     {"pixel_centroid_accuracy", r.pixel_centroid_accuracy}};
}

std::vector<std::string> class_keywords(std::size_t classes, std::size_t k) {
  if (k >= classes) throw ValueError("class " + std::to_string(k) + " out of range");
  if (classes == 3) return three_class_words()[k];
  if (classes == 7) return seven_class_words()[k];
  std::vector<std::string> words;
  for (std::size_t i = 0; i < 6; ++i) words.push_back("c" + std::to_string(k) + "w" + std::to_string(i));
  return words;
}

SynthResult synth_generate(const SynthSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  SynthResult result;
  const std::size_t n = spec.samples_per_class;
  const auto n_train = static_cast<std::size_t>(std::floor(0.70 * static_cast<double>(n)));
  const auto n_val = static_cast<std::size_t>(std::floor(0.15 * static_cast<double>(n)));
  for (std::size_t k = 0; k < spec.classes; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      ExampleRecord rec;
      char id[48];
      std::snprintf(id, sizeof(id), "synth-%zu-%04zu", k, i);
      rec.id = id;
      rec.label = static_cast<std::int32_t>(k);
      rec.split = i < n_train ? Split::kTrain : i < n_train + n_val ? Split::kVal : Split::kTest;
      rec.text = make_text(rng, spec, k);
      rec.image = make_image(rng, spec, k);
      result.records.push_back(std::move(rec));
    }
  }
  SynthReport& rep = result.report;
  rep.records = result.records.size();
  rep.train = n_train * spec.classes;
  rep.val = n_val * spec.classes;
  rep.test = rep.records - rep.train - rep.val;
  rep.labels = fusion::default_labels(spec.classes);
  const Dataset train = filter_split(result.records, Split::kTrain);
  rep.pixel_centroid_accuracy =
      nearest_centroid_accuracy(train.empty() ? result.records : train, result.records, spec.classes);
  return result;
}

double nearest_centroid_accuracy(const Dataset& fit, const Dataset& score, std::size_t n_classes) {
  if (fit.empty() || score.empty()) throw ValueError("nearest_centroid_accuracy: empty dataset");
  std::vector<std::vector<double>> centroid(n_classes);
  std::vector<std::size_t> count(n_classes, 0);
  for (const ExampleRecord& r : fit) {
    const RawImage img = resolve_image(r.image);
    auto& c = centroid[static_cast<std::size_t>(r.label)];
    if (c.empty()) c.assign(img.pixels.size(), 0.0);
    if (c.size() != img.pixels.size()) throw ShapeError("nearest_centroid_accuracy: images differ in size");
    for (std::size_t i = 0; i < c.size(); ++i) c[i] += img.pixels[i];
    ++count[static_cast<std::size_t>(r.label)];
  }
  for (std::size_t k = 0; k < n_classes; ++k)
    for (double& v : centroid[k]) v /= static_cast<double>(count[k]);

  std::size_t correct = 0;
  for (const ExampleRecord& r : score) {
    const RawImage img = resolve_image(r.image);
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_k = 0;
    for (std::size_t k = 0; k < n_classes; ++k) {
      if (centroid[k].size() != img.pixels.size()) continue;
      double d = 0.0;
      for (std::size_t i = 0; i < img.pixels.size(); ++i) {
        const double diff = img.pixels[i] - centroid[k][i];
        d += diff * diff;
      }
      if (d < best) {
        best = d;
        best_k = k;
      }
    }
    correct += static_cast<std::int32_t>(best_k) == r.label ? 1 : 0;
  }
  return static_cast<double>(correct) / static_cast<double>(score.size());
}

}  // namespace aiva::data
