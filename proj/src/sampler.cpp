// Copyright (c) 2026 the proxyisa authors
// SPDX-License-Identifier: Apache-2.0
#include "proxyisa/sampler.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "proxyisa/errors.hpp"
#include "proxyisa/rng.hpp"

namespace proxyisa {

namespace {

// Cycles through a shuffled permutation of one class's sample positions,
// reshuffling on wrap, so epoch coverage within the class is as even as the
// draw counts allow.
struct ClassCycler {
    std::vector<std::size_t> order;
    std::size_t pos = 0;

    std::size_t draw(RandomStream& rng) {
        if (pos == order.size()) {
            rng.shuffle(order);
            pos = 0;
        }
        return order[pos++];
    }
};

}  // namespace

std::vector<std::vector<std::size_t>> balanced_batches(
    const std::vector<int>& labels, std::size_t batch_size,
    std::size_t instances_per_class, std::uint64_t seed, std::uint64_t epoch) {
    if (batch_size == 0 || instances_per_class == 0 ||
        batch_size % instances_per_class != 0) {
        throw ConfigError("batch_size must be a positive multiple of instances_per_class");
    }
    const std::size_t classes_per_batch = batch_size / instances_per_class;

    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
    const std::size_t num_classes = by_class.size();
    if (num_classes < classes_per_batch) {
        throw ConfigError("batch needs " + std::to_string(classes_per_batch) +
                          " distinct classes but only " + std::to_string(num_classes) +
                          " exist");
    }

    RandomStream rng = RandomStream::derive(seed, "sampler", epoch);

    std::vector<int> class_ids;
    std::vector<ClassCycler> cyclers;
    class_ids.reserve(num_classes);
    for (auto& [cls, indices] : by_class) {
        class_ids.push_back(cls);
        ClassCycler cyc;
        cyc.order = indices;
        rng.shuffle(cyc.order);
        cyclers.push_back(std::move(cyc));
    }

    const std::size_t num_batches = (labels.size() + batch_size - 1) / batch_size;
    const std::size_t total_slots = num_batches * classes_per_batch;

    // Distribute class slots as evenly as possible; a random subset of
    // classes absorbs the remainder.
    std::vector<std::size_t> slots(num_classes, total_slots / num_classes);
    std::vector<std::size_t> extra(num_classes);
    std::iota(extra.begin(), extra.end(), 0);
    rng.shuffle(extra);
    for (std::size_t j = 0; j < total_slots % num_classes; ++j) slots[extra[j]] += 1;

    std::vector<std::vector<std::size_t>> batches(num_batches);
    std::vector<std::size_t> pick_order(num_classes);
    for (std::size_t b = 0; b < num_batches; ++b) {
        // Most-remaining-first keeps slot counts within one of each other, so
        // no class is ever stranded with slots the final batches cannot hold.
        std::iota(pick_order.begin(), pick_order.end(), 0);
        rng.shuffle(pick_order);
        std::stable_sort(pick_order.begin(), pick_order.end(),
                         [&](std::size_t a, std::size_t b2) { return slots[a] > slots[b2]; });
        auto& batch = batches[b];
        batch.reserve(batch_size);
        for (std::size_t j = 0; j < classes_per_batch; ++j) {
            const std::size_t cls_pos = pick_order[j];
            if (slots[cls_pos] > 0) slots[cls_pos] -= 1;
            for (std::size_t r = 0; r < instances_per_class; ++r) {
                batch.push_back(cyclers[cls_pos].draw(rng));
            }
        }
    }
    return batches;
}

}  // namespace proxyisa
