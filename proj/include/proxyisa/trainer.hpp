// Copyright (c) 2026 the proxyisa authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "proxyisa/config.hpp"
#include "proxyisa/memory_queue.hpp"
#include "proxyisa/model.hpp"
#include "proxyisa/optimizer.hpp"
#include "proxyisa/report.hpp"

namespace proxyisa {

// What one iteration did, for diagnostics and invariant checks.
struct IterationTrace {
    double loss = 0.0;
    std::vector<bool> outlier_mask;  // the filter set; true = excluded
    std::size_t enqueued = 0;
};

// Owns the full training state and drives the iteration flow: forward and
// similarity, per-class weights from the previous iteration's state snapshot,
// loss and gradient, cosine backward into raw embeddings and proxies,
// optimizer steps, then (when the memory is on) enqueue of clean samples and
// threshold refresh for the classes present in the batch.
class Trainer {
public:
    Trainer(const ExperimentConfig& cfg, Dataset dataset);

    // One optimization step over the given train-pool positions.
    IterationTrace train_iteration(const std::vector<std::size_t>& batch_positions,
                                   int epoch);

    // Metrics of the current model on the evaluation protocol the dataset
    // defines (eval split, query/gallery pair, or the train pool for table
    // mode, which cannot embed unseen samples).
    EpochRecord evaluate(int epoch) const;

    // Remaining epochs per the config, including the untrained evaluation
    // when starting fresh. Deterministic per (config, seed).
    RunReport run();

    // Versioned dump of everything needed to resume bit-identically: model,
    // proxies, optimizer moments, class states, queue contents, and the RNG
    // position expressed as (seed, epochs completed).
    nlohmann::json checkpoint() const;
    static Trainer restore(const nlohmann::json& ckpt);

    const ExperimentConfig& config() const { return cfg_; }
    const Dataset& dataset() const { return data_; }
    const EmbeddingModel& model() const { return model_; }
    const ProxySet& proxies() const { return proxies_; }
    const std::vector<ClassState>& states() const { return states_; }
    const MemoryQueue& queue() const { return queue_; }
    const std::vector<int>& train_labels() const { return train_labels_; }
    int epochs_completed() const { return epochs_completed_; }

private:
    void check_parameters_finite() const;

    ExperimentConfig cfg_;
    Dataset data_;
    std::vector<std::size_t> pool_rows_;  // train pool position -> dataset row
    std::vector<int> train_labels_;       // train pool position -> label in 1..C
    int num_train_classes_ = 0;
    EmbeddingModel model_;
    ProxySet proxies_;
    std::vector<ClassState> states_;
    MemoryQueue queue_;
    Optimizer opt_model_;
    Optimizer opt_proxies_;
    int epochs_completed_ = 0;
    long long global_step_ = 0;
};

RunReport run_experiment(const ExperimentConfig& cfg);
RunReport run_experiment(const ExperimentConfig& cfg, Dataset dataset);

// cmd_compare grid: one run per (loss, seed) cell under identical data and
// sampler seeds, summarized as mean +- population std of the final-epoch
// Recall@1 and MAP@R.
struct CompareCell {
    LossKind loss;
    std::uint64_t seed = 0;
    RunReport report;
};

struct CompareSummaryRow {
    LossKind loss;
    double recall1_mean = 0.0;
    double recall1_std = 0.0;
    double map_mean = 0.0;
    double map_std = 0.0;
};

struct CompareResult {
    std::vector<CompareCell> cells;
    std::vector<CompareSummaryRow> rows;
};

CompareResult run_compare(const ExperimentConfig& base);

}  // namespace proxyisa
