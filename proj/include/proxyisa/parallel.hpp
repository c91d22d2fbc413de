// Copyright (c) 2026 the proxyisa authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>

namespace proxyisa {

// Worker-thread cap from PROXY_ISA_THREADS (0 or unset = auto).
std::size_t worker_count();

// Runs fn(i) for i in [begin, end) across worker threads with static
// contiguous chunking. Callers must write only to per-index slots; any
// reduction over the results happens serially afterwards so the outcome is
// independent of thread timing.
void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t)>& fn);

}  // namespace proxyisa
