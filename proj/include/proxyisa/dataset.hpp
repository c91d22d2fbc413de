// Copyright (c) 2026 the proxyisa authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "proxyisa/linalg.hpp"

namespace proxyisa {

// Recipe for a synthetic retrieval dataset: one random unit mean direction
// per class, samples scattered around it with a per-class angular spread, and
// a controllable fraction of wide-spread outliers. Class spreads interpolate
// from spread_min to spread_max within each split, so both splits contain a
// mix of easy and hard classes.
struct SyntheticSpec {
    int num_classes = 0;    // total classes; the first train_classes are train
    int train_classes = 0;
    int dim = 0;            // feature dimension
    int samples_per_class = 0;
    double spread_min = 0.1;
    double spread_max = 0.1;
    double outlier_fraction = 0.0;
    double outlier_spread_multiplier = 3.0;
    std::uint64_t seed = 0;

    void validate() const;
};

struct Dataset {
    Matrix features;          // N x dim
    std::vector<int> labels;  // N
    std::vector<std::size_t> train_indices;
    std::vector<std::size_t> eval_indices;
    // Two-file evaluation split; empty when eval_indices is the whole story.
    std::vector<std::size_t> eval_query_indices;
    std::vector<std::size_t> eval_gallery_indices;
    std::vector<int> train_class_ids;  // sorted, disjoint from eval_class_ids
    std::vector<int> eval_class_ids;

    void validate() const;
};

// Deterministic per spec.seed. InfeasibleSeparationError when class means
// cannot be kept at least the maximum spread apart within the retry budget.
Dataset generate_synthetic(const SyntheticSpec& spec);

// Text embedding file: first line "dim=<d>", then "<label>,<v1>,...,<vd>";
// comment lines start with '#'. Rows labeled "proxy:<class>" carry reference
// vectors and are returned separately from the samples.
struct EmbeddingFile {
    int dim = 0;
    Matrix features;
    std::vector<int> labels;
    Matrix proxies;
    std::vector<int> proxy_classes;
};

EmbeddingFile load_embedding_file(const std::string& path);

void save_embedding_file(const std::string& path, const Matrix& features,
                         const std::vector<int>& labels,
                         const Matrix* proxies = nullptr,
                         const std::vector<int>* proxy_classes = nullptr);

// Builds a train/eval dataset from two embedding files. The splits must not
// share class ids.
Dataset dataset_from_files(const std::string& train_path, const std::string& eval_path);

}  // namespace proxyisa
