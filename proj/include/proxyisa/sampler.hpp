// Copyright (c) 2026 the proxyisa authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

namespace proxyisa {

// Class-balanced batch plan for one epoch. Every batch holds
// batch_size / instances_per_class distinct classes with instances_per_class
// samples each (drawn with replacement when a class is smaller). Class slots
// per epoch are split as evenly as possible, so per-class appearance counts
// stay within one slot of equal share. Deterministic per (seed, epoch).
//
// Returned values are positions into `labels`. ConfigError when batch_size is
// not divisible by instances_per_class or there are fewer classes than a
// batch needs.
std::vector<std::vector<std::size_t>> balanced_batches(
    const std::vector<int>& labels, std::size_t batch_size,
    std::size_t instances_per_class, std::uint64_t seed, std::uint64_t epoch);

}  // namespace proxyisa
