// Copyright 2026 The AIVA Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace aiva::data {

/// Indices into a dataset.
using Batch = std::vector<std::size_t>;

/// Seeded shuffle of [0, n) cut into batches of `batch_size`; the short
/// tail is dropped. batch_size must be at least 2.
std::vector<Batch> make_batches(std::size_t n, std::size_t batch_size, std::uint64_t seed);

}  // namespace aiva::data
