// Copyright (c) 2026 the proxyisa authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "proxyisa/linalg.hpp"

namespace proxyisa {

// Norms below this floor count as zero and cannot be normalized.
inline constexpr double kNormFloor = 1e-12;

// Mini-batch of unit-normalized embedding rows with 1-based class labels.
struct EmbeddingBatch {
    Matrix embeddings;        // m x d, every row unit norm within 1e-9
    std::vector<int> labels;  // length m, values in {1..C}

    std::size_t size() const { return labels.size(); }

    // Throws DimensionMismatchError / ZeroNormError on invariant breaches.
    void validate(int num_classes) const;
};

double vector_norm(std::span<const double> v);

// Unit-length copy of v; ZeroNormError below the norm floor.
Vector l2_normalize(std::span<const double> v);
void l2_normalize_in_place(std::span<double> v);

// Copy of m with each row unit-normalized.
Matrix unit_rows(const Matrix& m);

// S with S(i,c) = <row_i, unit(proxy_c)>, clamped into [-1, 1]. Proxies are
// given raw and normalized on read. DimensionMismatchError when the embedding
// and proxy dimensions differ.
Matrix similarity_matrix(const Matrix& unit_embeddings, const Matrix& raw_proxies);
Matrix similarity_matrix(const EmbeddingBatch& batch, const Matrix& raw_proxies);

// Gradient of upstream * cos(u_raw, v_raw) with respect to the raw (pre-
// normalization) vectors, accumulated into grad_u/grad_v:
//   d/du [ <u/|u|, v/|v|> ] = (v_hat - s * u_hat) / |u|     (s = cosine)
// The result is orthogonal to u_raw up to rounding.
void cosine_backward_into(std::span<const double> u_raw, std::span<const double> v_raw,
                          double upstream, std::span<double> grad_u,
                          std::span<double> grad_v);

struct CosineGrads {
    Vector grad_u;
    Vector grad_v;
};
CosineGrads cosine_backward(std::span<const double> u_raw,
                            std::span<const double> v_raw, double upstream);

// log(1 + sum_k exp(terms[k])), shifted so it cannot overflow for terms up to
// about +-1e4. Empty input yields exactly 0.
double log1p_sum_exp(std::span<const double> terms);

// Shift-and-sum backing log1p_sum_exp, exposed so loss gradients can reuse
// the identical denominator. With shift = max(0, max terms) and
// sum_terms = sum_k exp(terms[k] - shift):
//   log1p_sum_exp = shift + log(exp(-shift) + sum_terms)
//   d/d terms[i]  = exp(terms[i] - shift) / (exp(-shift) + sum_terms)
struct ShiftedExpSum {
    double shift = 0.0;
    double sum_terms = 0.0;
    double denominator() const;  // exp(-shift) + sum_terms
    double log_value() const;
};
ShiftedExpSum shifted_exp_sum(std::span<const double> terms);

}  // namespace proxyisa
