// Copyright (c) 2026 the proxyisa authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <deque>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "proxyisa/embedding.hpp"

namespace proxyisa {

// Bounded FIFO of clean embeddings with labels. Supplies the per-class mean
// proxy similarity that drives the learned-subspace thresholds. Similarities
// are recomputed against the live proxy at read time; only the embeddings are
// stored, which stay usable across nearby iterations (slow drift).
class MemoryQueue {
public:
    struct Entry {
        Vector embedding;
        int label = 0;
    };

    explicit MemoryQueue(std::size_t capacity) : capacity_(capacity) {}

    // Rebuilds a queue from checkpointed entries, oldest first.
    static MemoryQueue from_entries(std::size_t capacity, std::vector<Entry> entries);

    // Appends every non-masked sample in batch order, then evicts oldest
    // entries until the queue fits its capacity.
    void enqueue_clean(const EmbeddingBatch& batch, const std::vector<bool>& outlier_mask);

    // Mean cosine similarity between stored class members and the unit
    // normalization of raw_proxy; nullopt while the class has no entries.
    std::optional<double> class_mean_similarity(std::span<const double> raw_proxy,
                                                int class_id) const;

    std::size_t size() const { return entries_.size(); }
    std::size_t capacity() const { return capacity_; }
    std::size_t class_count(int class_id) const;
    const std::deque<Entry>& entries() const { return entries_; }

private:
    void push(Entry entry);
    void evict_overflow();

    std::size_t capacity_ = 0;
    std::deque<Entry> entries_;
    std::map<int, std::size_t> per_class_;
};

}  // namespace proxyisa
