// Copyright (c) 2026 the proxyisa authors
// SPDX-License-Identifier: Apache-2.0
#include "proxyisa/model.hpp"

#include <algorithm>
#include <cmath>

#include "proxyisa/embedding.hpp"
#include "proxyisa/kernels.hpp"
#include "proxyisa/rng.hpp"

namespace proxyisa {

void ProxySet::validate() const {
    for (std::size_t c = 0; c < rows.rows; ++c) {
        const auto row = rows.row(c);
        if (!all_finite(row)) {
            throw ZeroNormError("proxy " + std::to_string(c + 1) + " is not finite");
        }
        if (vector_norm(row) < kNormFloor) {
            throw ZeroNormError("proxy " + std::to_string(c + 1) + " collapsed to zero");
        }
    }
}

ProxySet init_proxies(int num_classes, int dim, std::uint64_t seed) {
    if (num_classes < 1 || dim < 1) {
        throw ConfigError("init_proxies needs num_classes >= 1 and dim >= 1");
    }
    RandomStream rng = RandomStream::derive(seed, "proxy-init");
    ProxySet out{Matrix(num_classes, dim)};
    for (std::size_t c = 0; c < out.rows.rows; ++c) {
        auto row = out.rows.row(c);
        for (double& x : row) x = rng.normal();
        l2_normalize_in_place(row);
    }
    return out;
}

std::optional<double> class_mean_similarity(const MemoryQueue& queue,
                                            const ProxySet& proxies, int class_id) {
    if (class_id < 1 || class_id > static_cast<int>(proxies.num_classes())) {
        throw DimensionMismatchError("class id " + std::to_string(class_id) +
                                     " has no proxy");
    }
    return queue.class_mean_similarity(proxies.rows.row(class_id - 1), class_id);
}

std::string to_string(ModelMode mode) {
    return mode == ModelMode::linear_projection ? "linear" : "table";
}

ModelMode model_mode_from_string(const std::string& s) {
    if (s == "linear") return ModelMode::linear_projection;
    if (s == "table") return ModelMode::embedding_table;
    throw ConfigError("unknown model mode '" + s + "'");
}

EmbeddingModel EmbeddingModel::linear(int input_dim, int embedding_dim,
                                      std::uint64_t seed) {
    if (input_dim < 1 || embedding_dim < 1) {
        throw ConfigError("linear model needs positive dimensions");
    }
    RandomStream rng = RandomStream::derive(seed, "model-init");
    Matrix w(input_dim, embedding_dim);
    const double scale = 1.0 / std::sqrt(static_cast<double>(input_dim));
    for (double& x : w.data) x = scale * rng.normal();
    return EmbeddingModel(ModelMode::linear_projection, std::move(w));
}

EmbeddingModel EmbeddingModel::table(std::size_t num_samples, int embedding_dim,
                                     std::uint64_t seed) {
    if (num_samples < 1 || embedding_dim < 1) {
        throw ConfigError("table model needs positive dimensions");
    }
    RandomStream rng = RandomStream::derive(seed, "model-init");
    Matrix t(num_samples, embedding_dim);
    for (double& x : t.data) x = rng.normal();
    return EmbeddingModel(ModelMode::embedding_table, std::move(t));
}

EmbeddingModel EmbeddingModel::from_params(ModelMode mode, Matrix params) {
    return EmbeddingModel(mode, std::move(params));
}

void EmbeddingModel::forward(std::span<const double> features,
                             std::size_t sample_index, std::span<double> raw_out,
                             std::span<double> unit_out) const {
    const std::size_t d = params_.cols;
    if (raw_out.size() != d || unit_out.size() != d) {
        throw DimensionMismatchError("forward: output buffers vs embedding dim");
    }
    std::fill(raw_out.begin(), raw_out.end(), 0.0);
    if (mode_ == ModelMode::linear_projection) {
        if (features.size() != params_.rows) {
            throw DimensionMismatchError("forward: feature dim vs projection rows");
        }
        for (std::size_t k = 0; k < params_.rows; ++k) {
            kern::axpy(features[k], params_.row(k).data(), raw_out.data(), d);
        }
    } else {
        if (sample_index >= params_.rows) {
            throw DimensionMismatchError("forward: sample index outside table");
        }
        const auto row = params_.row(sample_index);
        std::copy(row.begin(), row.end(), raw_out.begin());
    }
    std::copy(raw_out.begin(), raw_out.end(), unit_out.begin());
    l2_normalize_in_place(unit_out);
}

void EmbeddingModel::accumulate_param_grad(std::span<const double> features,
                                           std::size_t sample_index,
                                           std::span<const double> grad_raw,
                                           Matrix& param_grad) const {
    if (!param_grad.same_shape(params_)) {
        throw ShapeMismatchError("param grad buffer shape");
    }
    const std::size_t d = params_.cols;
    if (grad_raw.size() != d) {
        throw DimensionMismatchError("grad_raw vs embedding dim");
    }
    if (mode_ == ModelMode::linear_projection) {
        // raw = sum_k features[k] * W_k => dL/dW_k = features[k] * grad_raw.
        for (std::size_t k = 0; k < params_.rows; ++k) {
            kern::axpy(features[k], grad_raw.data(), param_grad.row(k).data(), d);
        }
    } else {
        kern::axpy(1.0, grad_raw.data(), param_grad.row(sample_index).data(), d);
    }
}

}  // namespace proxyisa
