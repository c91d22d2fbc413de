// Copyright (c) 2026 the proxyisa authors
// SPDX-License-Identifier: Apache-2.0
#include "proxyisa/memory_queue.hpp"

#include "proxyisa/kernels.hpp"

namespace proxyisa {

MemoryQueue MemoryQueue::from_entries(std::size_t capacity,
                                      std::vector<Entry> entries) {
    MemoryQueue q(capacity);
    for (Entry& e : entries) q.push(std::move(e));
    q.evict_overflow();
    return q;
}

void MemoryQueue::push(Entry entry) {
    per_class_[entry.label] += 1;
    entries_.push_back(std::move(entry));
}

void MemoryQueue::evict_overflow() {
    while (entries_.size() > capacity_) {
        auto it = per_class_.find(entries_.front().label);
        if (--(it->second) == 0) per_class_.erase(it);
        entries_.pop_front();
    }
}

void MemoryQueue::enqueue_clean(const EmbeddingBatch& batch,
                                const std::vector<bool>& outlier_mask) {
    if (outlier_mask.size() != batch.size()) {
        throw DimensionMismatchError("enqueue: mask length vs batch size");
    }
    for (std::size_t i = 0; i < batch.size(); ++i) {
        if (outlier_mask[i]) continue;
        const auto row = batch.embeddings.row(i);
        push(Entry{Vector(row.begin(), row.end()), batch.labels[i]});
    }
    evict_overflow();
}

std::optional<double> MemoryQueue::class_mean_similarity(
    std::span<const double> raw_proxy, int class_id) const {
    const std::size_t count = class_count(class_id);
    if (count == 0) return std::nullopt;
    const Vector proxy = l2_normalize(raw_proxy);
    double sum = 0.0;
    for (const Entry& e : entries_) {
        if (e.label != class_id) continue;
        if (e.embedding.size() != proxy.size()) {
            throw DimensionMismatchError("queue: stored dim vs proxy dim");
        }
        sum += kern::dot(e.embedding.data(), proxy.data(), proxy.size());
    }
    return sum / static_cast<double>(count);
}

std::size_t MemoryQueue::class_count(int class_id) const {
    const auto it = per_class_.find(class_id);
    return it == per_class_.end() ? 0 : it->second;
}

}  // namespace proxyisa
