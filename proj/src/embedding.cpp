// Copyright (c) 2026 the proxyisa authors
// SPDX-License-Identifier: Apache-2.0
#include "proxyisa/embedding.hpp"

#include <algorithm>
#include <cmath>

#include "proxyisa/kernels.hpp"

namespace proxyisa {

void EmbeddingBatch::validate(int num_classes) const {
    if (embeddings.rows != labels.size()) {
        throw DimensionMismatchError("batch: row count does not match label count");
    }
    for (std::size_t i = 0; i < embeddings.rows; ++i) {
        const double norm = vector_norm(embeddings.row(i));
        if (std::abs(norm - 1.0) > 1e-9) {
            throw ZeroNormError("batch: row " + std::to_string(i) +
                                " is not unit norm");
        }
    }
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 1 || labels[i] > num_classes) {
            throw DimensionMismatchError("batch: label " + std::to_string(labels[i]) +
                                         " outside {1.." +
                                         std::to_string(num_classes) + "}");
        }
    }
}

double vector_norm(std::span<const double> v) {
    return std::sqrt(kern::squared_norm(v.data(), v.size()));
}

void l2_normalize_in_place(std::span<double> v) {
    const double norm = vector_norm(v);
    if (norm < kNormFloor) {
        throw ZeroNormError("cannot normalize a vector of norm " + std::to_string(norm));
    }
    kern::scale(1.0 / norm, v.data(), v.size());
}

Vector l2_normalize(std::span<const double> v) {
    Vector out(v.begin(), v.end());
    l2_normalize_in_place(out);
    return out;
}

Matrix unit_rows(const Matrix& m) {
    Matrix out = m;
    for (std::size_t r = 0; r < out.rows; ++r) l2_normalize_in_place(out.row(r));
    return out;
}

Matrix similarity_matrix(const Matrix& unit_embeddings, const Matrix& raw_proxies) {
    if (unit_embeddings.cols != raw_proxies.cols) {
        throw DimensionMismatchError("similarity: embedding dim " +
                                     std::to_string(unit_embeddings.cols) +
                                     " vs proxy dim " +
                                     std::to_string(raw_proxies.cols));
    }
    const Matrix proxies = unit_rows(raw_proxies);
    Matrix s(unit_embeddings.rows, proxies.rows);
    for (std::size_t i = 0; i < unit_embeddings.rows; ++i) {
        const auto row = unit_embeddings.row(i);
        for (std::size_t c = 0; c < proxies.rows; ++c) {
            const double v = kern::dot(row.data(), proxies.row(c).data(), row.size());
            // Rounding can push a cosine of unit vectors a hair outside [-1, 1];
            // downstream thresholds assume the closed interval.
            s(i, c) = std::clamp(v, -1.0, 1.0);
        }
    }
    return s;
}

Matrix similarity_matrix(const EmbeddingBatch& batch, const Matrix& raw_proxies) {
    return similarity_matrix(batch.embeddings, raw_proxies);
}

void cosine_backward_into(std::span<const double> u_raw, std::span<const double> v_raw,
                          double upstream, std::span<double> grad_u,
                          std::span<double> grad_v) {
    if (u_raw.size() != v_raw.size() || grad_u.size() != u_raw.size() ||
        grad_v.size() != v_raw.size()) {
        throw DimensionMismatchError("cosine_backward: vector sizes differ");
    }
    const std::size_t d = u_raw.size();
    const double norm_u = vector_norm(u_raw);
    const double norm_v = vector_norm(v_raw);
    if (norm_u < kNormFloor || norm_v < kNormFloor) {
        throw ZeroNormError("cosine_backward: zero-norm input");
    }
    const double inv_u = 1.0 / norm_u;
    const double inv_v = 1.0 / norm_v;
    const double s = kern::dot(u_raw.data(), v_raw.data(), d) * inv_u * inv_v;
    // grad_u += upstream/|u| * (v_hat - s*u_hat); v_hat = v/|v|, u_hat = u/|u|.
    kern::axpy(upstream * inv_u * inv_v, v_raw.data(), grad_u.data(), d);
    kern::axpy(-upstream * s * inv_u * inv_u, u_raw.data(), grad_u.data(), d);
    kern::axpy(upstream * inv_v * inv_u, u_raw.data(), grad_v.data(), d);
    kern::axpy(-upstream * s * inv_v * inv_v, v_raw.data(), grad_v.data(), d);
}

CosineGrads cosine_backward(std::span<const double> u_raw,
                            std::span<const double> v_raw, double upstream) {
    CosineGrads g{Vector(u_raw.size(), 0.0), Vector(v_raw.size(), 0.0)};
    cosine_backward_into(u_raw, v_raw, upstream, g.grad_u, g.grad_v);
    return g;
}

ShiftedExpSum shifted_exp_sum(std::span<const double> terms) {
    ShiftedExpSum out;
    // The implicit +1 term is exp(0), so the shift never drops below 0.
    double shift = 0.0;
    for (double t : terms) shift = std::max(shift, t);
    double sum = 0.0;
    for (double t : terms) sum += std::exp(t - shift);
    out.shift = shift;
    out.sum_terms = sum;
    return out;
}

double ShiftedExpSum::denominator() const { return std::exp(-shift) + sum_terms; }

double ShiftedExpSum::log_value() const {
    if (shift == 0.0) return std::log1p(sum_terms);
    return shift + std::log(std::exp(-shift) + sum_terms);
}

double log1p_sum_exp(std::span<const double> terms) {
    return shifted_exp_sum(terms).log_value();
}

}  // namespace proxyisa
