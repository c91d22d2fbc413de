// Copyright (c) 2026 the proxyisa authors
// SPDX-License-Identifier: Apache-2.0
#include "proxyisa/metrics.hpp"

#include <algorithm>
#include <numeric>

#include "proxyisa/errors.hpp"
#include "proxyisa/kernels.hpp"
#include "proxyisa/parallel.hpp"

namespace proxyisa {

namespace {

struct Candidate {
    double sim;
    std::size_t index;
};

// sim descending, ties by lower index.
bool better(const Candidate& a, const Candidate& b) {
    return a.sim > b.sim || (a.sim == b.sim && a.index < b.index);
}

void check_pair(const Matrix& queries, const std::vector<int>& qlabels,
                const Matrix& gallery, const std::vector<int>& glabels,
                bool exclude_self) {
    if (queries.rows != qlabels.size() || gallery.rows != glabels.size()) {
        throw DimensionMismatchError("metrics: rows vs labels");
    }
    if (queries.cols != gallery.cols) {
        throw DimensionMismatchError("metrics: query dim vs gallery dim");
    }
    if (exclude_self && queries.rows != gallery.rows) {
        throw DimensionMismatchError("metrics: self-exclusion needs aligned sets");
    }
}

std::vector<Candidate> ranked_candidates(const Matrix& queries, std::size_t q,
                                         const Matrix& gallery, bool exclude_self) {
    std::vector<Candidate> cands;
    cands.reserve(gallery.rows);
    const auto row = queries.row(q);
    for (std::size_t j = 0; j < gallery.rows; ++j) {
        if (exclude_self && j == q) continue;
        cands.push_back({kern::dot(row.data(), gallery.row(j).data(), row.size()), j});
    }
    std::sort(cands.begin(), cands.end(), better);
    return cands;
}

}  // namespace

double recall_at_k(const Matrix& queries, const std::vector<int>& qlabels,
                   const Matrix& gallery, const std::vector<int>& glabels,
                   int k, bool exclude_self) {
    check_pair(queries, qlabels, gallery, glabels, exclude_self);
    if (k < 1) throw InsufficientDataError("recall needs k >= 1");
    const std::size_t min_gallery = exclude_self ? 2 : 1;
    if (queries.rows == 0 || gallery.rows < min_gallery) {
        throw InsufficientDataError("recall needs at least one candidate per query");
    }
    std::vector<char> hits(queries.rows, 0);
    parallel_for(0, queries.rows, [&](std::size_t q) {
        auto cands = ranked_candidates(queries, q, gallery, exclude_self);
        const std::size_t top = std::min<std::size_t>(cands.size(), static_cast<std::size_t>(k));
        for (std::size_t r = 0; r < top; ++r) {
            if (glabels[cands[r].index] == qlabels[q]) {
                hits[q] = 1;
                break;
            }
        }
    });
    const double total = std::accumulate(hits.begin(), hits.end(), 0.0);
    return total / static_cast<double>(queries.rows);
}

double map_at_r(const Matrix& queries, const std::vector<int>& qlabels,
                const Matrix& gallery, const std::vector<int>& glabels,
                bool exclude_self) {
    check_pair(queries, qlabels, gallery, glabels, exclude_self);
    if (queries.rows == 0) throw InsufficientDataError("map_at_r on empty query set");

    // R per query: same-class gallery entries, minus the query itself.
    std::vector<std::size_t> r_of(queries.rows, 0);
    for (std::size_t q = 0; q < queries.rows; ++q) {
        std::size_t r = 0;
        for (std::size_t j = 0; j < gallery.rows; ++j) {
            if (exclude_self && j == q) continue;
            if (glabels[j] == qlabels[q]) ++r;
        }
        if (r == 0) {
            throw InsufficientDataError("map_at_r: class " +
                                        std::to_string(qlabels[q]) +
                                        " has no reference beyond the query");
        }
        r_of[q] = r;
    }

    std::vector<double> ap(queries.rows, 0.0);
    parallel_for(0, queries.rows, [&](std::size_t q) {
        auto cands = ranked_candidates(queries, q, gallery, exclude_self);
        const std::size_t r = r_of[q];
        std::size_t relevant_seen = 0;
        double sum_precision = 0.0;
        for (std::size_t i = 0; i < r && i < cands.size(); ++i) {
            if (glabels[cands[i].index] == qlabels[q]) {
                ++relevant_seen;
                sum_precision += static_cast<double>(relevant_seen) /
                                 static_cast<double>(i + 1);
            }
        }
        ap[q] = sum_precision / static_cast<double>(r);
    });
    const double total = std::accumulate(ap.begin(), ap.end(), 0.0);
    return total / static_cast<double>(queries.rows);
}

double recall_at_k(const Matrix& embeddings, const std::vector<int>& labels, int k) {
    if (embeddings.rows < 2) {
        throw InsufficientDataError("recall needs at least two samples");
    }
    return recall_at_k(embeddings, labels, embeddings, labels, k, /*exclude_self=*/true);
}

double map_at_r(const Matrix& embeddings, const std::vector<int>& labels) {
    return map_at_r(embeddings, labels, embeddings, labels, /*exclude_self=*/true);
}

}  // namespace proxyisa
