// Copyright (c) 2026 the proxyisa authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "proxyisa/linalg.hpp"

namespace proxyisa {

// Scaling factor and margin shared by the anchor-style losses.
struct LossHyper {
    double alpha = 32.0;
    double delta = 0.1;

    void validate() const;
};

// Loss value plus dL/dS. The gradient follows the sign convention that makes
// |grad_s| the per-pair weight: <= 0 at positive pairs (pulling the pair
// together) and >= 0 at negative pairs (pushing it apart).
struct LossOutput {
    double value = 0.0;
    Matrix grad_s;
};

// Dynamic pair weights, m x C. omega_pos is meaningful where y_i == c,
// omega_neg where y_i != c; the remaining slots are filled with the neutral 1.
struct PairWeights {
    Matrix omega_pos;
    Matrix omega_neg;
};

PairWeights unit_pair_weights(std::size_t m, std::size_t num_classes);

// Proxy-Anchor loss:
//   L = 1/|C+| sum_{c in C+} log(1 + sum_{i: y_i=c} e^{alpha(delta - S_ic)})
//     + 1/C    sum_{c}       log(1 + sum_{i: y_i!=c} e^{alpha(delta + S_ic)})
// present_classes must be the set of labels occurring in the batch.
LossOutput proxy_anchor(const Matrix& s, const std::vector<int>& labels,
                        const std::vector<int>& present_classes,
                        const LossHyper& hyper);

// The closed-form gradient weights of proxy_anchor, computed directly from
// the weight formula rather than through the loss derivative. Equal to
// |grad_s| of proxy_anchor on the same inputs up to rounding.
Matrix proxy_anchor_weights(const Matrix& s, const std::vector<int>& labels,
                            const std::vector<int>& present_classes,
                            const LossHyper& hyper);

// Cross-entropy over temperature-scaled similarity rows; the comparison
// baseline that optimizes a global proxy distribution per sample.
LossOutput normalized_softmax(const Matrix& s, const std::vector<int>& labels,
                              double temperature);

// Weighted anchor loss: each exponent is scaled by its pair weight and each
// term group is normalized by the batch-mean weights,
//   L = 1/sum_{c in C+} wbar+_c sum_{c in C+} log(1 + sum e^{w+ alpha(delta - S)})
//     + 1/sum_c wbar-_c         sum_c        log(1 + sum e^{w- alpha(delta + S)})
// Weights and normalizers are constants with respect to S. With all weights
// equal to 1 this reproduces proxy_anchor bit for bit.
LossOutput proxy_isa(const Matrix& s, const std::vector<int>& labels,
                     const std::vector<int>& present_classes,
                     const PairWeights& weights, const LossHyper& hyper);

enum class PairSide { positive, negative };

// Both sides of the variational identity behind the anchor loss terms:
//   log(1 + sum_i e^{alpha(delta -+ S_i)})
//     = alpha sum_i P(i)(delta -+ S_i) + H(P)
// where P is the maximizing distribution (softmax over the terms with a
// reserved slot for the margin) and H includes that slot.
struct Proposition1Result {
    double lhs = 0.0;
    double rhs = 0.0;
};
Proposition1Result verify_proposition1(std::span<const double> s_column,
                                       const LossHyper& hyper, PairSide side);

}  // namespace proxyisa
