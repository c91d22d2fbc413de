// Copyright (c) 2026 the proxyisa authors
// SPDX-License-Identifier: Apache-2.0
#include "proxyisa/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace proxyisa {

std::size_t worker_count() {
    std::size_t cap = 0;
    if (const char* env = std::getenv("PROXY_ISA_THREADS")) {
        cap = static_cast<std::size_t>(std::strtoull(env, nullptr, 10));
    }
    if (cap == 0) {
        cap = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    }
    return cap;
}

void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t)>& fn) {
    if (end <= begin) return;
    const std::size_t n = end - begin;
    const std::size_t workers = std::min(worker_count(), n);
    // Thread startup dwarfs small ranges.
    if (workers <= 1 || n < 128) {
        for (std::size_t i = begin; i < end; ++i) fn(i);
        return;
    }
    const std::size_t chunk = (n + workers - 1) / workers;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t lo = begin + w * chunk;
        const std::size_t hi = std::min(end, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&fn, lo, hi] {
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace proxyisa
