// Copyright 2026 The AIVA Authors
// SPDX-License-Identifier: Apache-2.0

#include "aiva/datasets/batching.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <string>

#include "aiva/error.hpp"

namespace aiva::data {

std::vector<Batch> make_batches(std::size_t n, std::size_t batch_size, std::uint64_t seed) {
  if (batch_size < 2) throw ValueError("batch_size must be at least 2, got " + std::to_string(batch_size));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<Batch> batches;
  for (std::size_t start = 0; start + batch_size <= n; start += batch_size) {
    batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start),
                         order.begin() + static_cast<std::ptrdiff_t>(start + batch_size));
  }
  return batches;
}

}  // namespace aiva::data
