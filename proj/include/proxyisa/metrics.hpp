// Copyright (c) 2026 the proxyisa authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "proxyisa/linalg.hpp"

namespace proxyisa {

// Retrieval metrics over unit-norm embedding rows under cosine similarity.
// Neighbor ties are broken by lower candidate index so results are
// reproducible. The query/gallery forms back the two-file evaluation split;
// exclude_self skips candidate j == query j and requires aligned sets.

double recall_at_k(const Matrix& queries, const std::vector<int>& query_labels,
                   const Matrix& gallery, const std::vector<int>& gallery_labels,
                   int k, bool exclude_self);

double map_at_r(const Matrix& queries, const std::vector<int>& query_labels,
                const Matrix& gallery, const std::vector<int>& gallery_labels,
                bool exclude_self);

// Single-set protocol: every sample queries the rest of the set.
double recall_at_k(const Matrix& embeddings, const std::vector<int>& labels, int k);
double map_at_r(const Matrix& embeddings, const std::vector<int>& labels);

}  // namespace proxyisa
