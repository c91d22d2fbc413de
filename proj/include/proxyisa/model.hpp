// Copyright (c) 2026 the proxyisa authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "proxyisa/linalg.hpp"
#include "proxyisa/memory_queue.hpp"

namespace proxyisa {

// One trainable reference vector per class, stored raw and consumed in unit
// form, so cosine gradients flow through the normalization map.
struct ProxySet {
    Matrix rows;  // C x d

    std::size_t num_classes() const { return rows.rows; }
    std::size_t dim() const { return rows.cols; }

    // ZeroNormError if any row has collapsed below the norm floor.
    void validate() const;
};

// Rows i.i.d. standard normal, scaled to unit norm; deterministic per seed.
ProxySet init_proxies(int num_classes, int dim, std::uint64_t seed);

std::optional<double> class_mean_similarity(const MemoryQueue& queue,
                                            const ProxySet& proxies, int class_id);

enum class ModelMode { linear_projection, embedding_table };

std::string to_string(ModelMode mode);
ModelMode model_mode_from_string(const std::string& s);

// Stand-in embedding network: either a trainable linear map over input
// features or a free per-sample embedding table, always followed by unit
// normalization.
class EmbeddingModel {
public:
    static EmbeddingModel linear(int input_dim, int embedding_dim, std::uint64_t seed);
    static EmbeddingModel table(std::size_t num_samples, int embedding_dim,
                                std::uint64_t seed);
    static EmbeddingModel from_params(ModelMode mode, Matrix params);

    ModelMode mode() const { return mode_; }
    int embedding_dim() const { return static_cast<int>(params_.cols); }
    Matrix& params() { return params_; }
    const Matrix& params() const { return params_; }

    // Writes the pre-normalization vector and its unit form. `features` is
    // ignored in table mode, `sample_index` in linear mode.
    void forward(std::span<const double> features, std::size_t sample_index,
                 std::span<double> raw_out, std::span<double> unit_out) const;

    // Chain rule from a gradient w.r.t. the raw output into the parameter
    // gradient buffer (same shape as params()).
    void accumulate_param_grad(std::span<const double> features,
                               std::size_t sample_index,
                               std::span<const double> grad_raw,
                               Matrix& param_grad) const;

private:
    EmbeddingModel(ModelMode mode, Matrix params)
        : mode_(mode), params_(std::move(params)) {}

    ModelMode mode_;
    Matrix params_;  // linear: input_dim x d; table: num_samples x d
};

}  // namespace proxyisa
