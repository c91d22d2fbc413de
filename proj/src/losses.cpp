// Copyright (c) 2026 the proxyisa authors
// SPDX-License-Identifier: Apache-2.0
#include "proxyisa/losses.hpp"

#include <algorithm>
#include <cmath>

#include "proxyisa/embedding.hpp"

namespace proxyisa {

namespace {

void check_batch_inputs(const Matrix& s, const std::vector<int>& labels) {
    if (s.rows == 0) throw EmptyBatchError("loss on an empty batch");
    if (s.rows != labels.size()) {
        throw DimensionMismatchError("loss: similarity rows vs labels");
    }
    for (int y : labels) {
        if (y < 1 || y > static_cast<int>(s.cols)) {
            throw DimensionMismatchError("loss: label " + std::to_string(y) +
                                         " has no proxy column");
        }
    }
}

std::vector<int> sorted_unique(const std::vector<int>& classes) {
    std::vector<int> out = classes;
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// One side of the anchor objective. For every class in `classes`, gathers the
// member similarities of that side, evaluates log(1 + sum exp(w*alpha*base))
// and accumulates the matching gradient entries. `omega` == nullptr means
// unit weights; passing all-ones gives bit-identical results.
//   positive side: base = delta - S, sign = -1
//   negative side: base = delta + S, sign = +1
double accumulate_side(const Matrix& s, const std::vector<int>& labels,
                       const std::vector<int>& classes, bool positive_side,
                       const Matrix* omega, const LossHyper& hyper,
                       double normalizer, Matrix& grad) {
    std::vector<std::size_t> members;
    std::vector<double> terms;
    std::vector<double> coeffs;  // w * alpha per member
    double total = 0.0;
    for (int cls : classes) {
        const std::size_t col = static_cast<std::size_t>(cls - 1);
        members.clear();
        terms.clear();
        coeffs.clear();
        for (std::size_t i = 0; i < s.rows; ++i) {
            if ((labels[i] == cls) != positive_side) continue;
            const double base = positive_side ? hyper.delta - s(i, col)
                                              : hyper.delta + s(i, col);
            const double wa =
                (omega ? (*omega)(i, col) : 1.0) * hyper.alpha;
            members.push_back(i);
            terms.push_back(wa * base);
            coeffs.push_back(wa);
        }
        if (members.empty()) continue;
        const ShiftedExpSum se = shifted_exp_sum(terms);
        total += se.log_value();
        const double denom = se.denominator();
        const double sign = positive_side ? -1.0 : 1.0;
        for (std::size_t k = 0; k < members.size(); ++k) {
            grad(members[k], col) +=
                sign * coeffs[k] * std::exp(terms[k] - se.shift) / denom / normalizer;
        }
    }
    return total / normalizer;
}

}  // namespace

void LossHyper::validate() const {
    if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
    if (!(delta >= 0.0)) throw ConfigError("delta must be non-negative");
}

PairWeights unit_pair_weights(std::size_t m, std::size_t num_classes) {
    return PairWeights{Matrix(m, num_classes, 1.0), Matrix(m, num_classes, 1.0)};
}

LossOutput proxy_anchor(const Matrix& s, const std::vector<int>& labels,
                        const std::vector<int>& present_classes,
                        const LossHyper& hyper) {
    hyper.validate();
    check_batch_inputs(s, labels);
    const std::vector<int> present = sorted_unique(present_classes);
    std::vector<int> all_classes(s.cols);
    for (std::size_t c = 0; c < s.cols; ++c) all_classes[c] = static_cast<int>(c + 1);

    LossOutput out;
    out.grad_s = Matrix(s.rows, s.cols, 0.0);
    out.value = accumulate_side(s, labels, present, /*positive=*/true, nullptr,
                                hyper, static_cast<double>(present.size()),
                                out.grad_s) +
                accumulate_side(s, labels, all_classes, /*positive=*/false, nullptr,
                                hyper, static_cast<double>(s.cols), out.grad_s);
    return out;
}

Matrix proxy_anchor_weights(const Matrix& s, const std::vector<int>& labels,
                            const std::vector<int>& present_classes,
                            const LossHyper& hyper) {
    hyper.validate();
    check_batch_inputs(s, labels);
    const std::vector<int> present = sorted_unique(present_classes);
    Matrix w(s.rows, s.cols, 0.0);

    // Positive weights: alpha e^{a(d-S_ic)} / (1 + sum_{j:y_j=c} e^{a(d-S_jc)}),
    // scaled by 1/|C+|. Shift by the raw maximum (no clamp at zero) so this
    // route is arithmetically independent from the loss-gradient route.
    for (int cls : present) {
        const std::size_t col = static_cast<std::size_t>(cls - 1);
        double mx = -HUGE_VAL;
        for (std::size_t i = 0; i < s.rows; ++i) {
            if (labels[i] == cls) mx = std::max(mx, hyper.alpha * (hyper.delta - s(i, col)));
        }
        if (mx == -HUGE_VAL) continue;
        double denom = std::exp(-mx);
        for (std::size_t j = 0; j < s.rows; ++j) {
            if (labels[j] == cls) denom += std::exp(hyper.alpha * (hyper.delta - s(j, col)) - mx);
        }
        for (std::size_t i = 0; i < s.rows; ++i) {
            if (labels[i] != cls) continue;
            const double t = hyper.alpha * (hyper.delta - s(i, col));
            w(i, col) = hyper.alpha * std::exp(t - mx) / denom / static_cast<double>(present.size());
        }
    }
    // Negative weights, scaled by 1/C.
    for (std::size_t col = 0; col < s.cols; ++col) {
        const int cls = static_cast<int>(col + 1);
        double mx = -HUGE_VAL;
        for (std::size_t i = 0; i < s.rows; ++i) {
            if (labels[i] != cls) mx = std::max(mx, hyper.alpha * (hyper.delta + s(i, col)));
        }
        if (mx == -HUGE_VAL) continue;
        double denom = std::exp(-mx);
        for (std::size_t j = 0; j < s.rows; ++j) {
            if (labels[j] != cls) denom += std::exp(hyper.alpha * (hyper.delta + s(j, col)) - mx);
        }
        for (std::size_t i = 0; i < s.rows; ++i) {
            if (labels[i] == cls) continue;
            const double t = hyper.alpha * (hyper.delta + s(i, col));
            w(i, col) = hyper.alpha * std::exp(t - mx) / denom / static_cast<double>(s.cols);
        }
    }
    return w;
}

LossOutput normalized_softmax(const Matrix& s, const std::vector<int>& labels,
                              double temperature) {
    if (!(temperature > 0.0)) throw ConfigError("temperature must be positive");
    check_batch_inputs(s, labels);
    const double m = static_cast<double>(s.rows);
    LossOutput out;
    out.grad_s = Matrix(s.rows, s.cols, 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < s.rows; ++i) {
        double mx = -HUGE_VAL;
        for (std::size_t c = 0; c < s.cols; ++c) mx = std::max(mx, s(i, c) / temperature);
        double z = 0.0;
        for (std::size_t c = 0; c < s.cols; ++c) z += std::exp(s(i, c) / temperature - mx);
        const double lse = mx + std::log(z);
        const std::size_t target = static_cast<std::size_t>(labels[i] - 1);
        total += lse - s(i, target) / temperature;
        for (std::size_t c = 0; c < s.cols; ++c) {
            const double p = std::exp(s(i, c) / temperature - lse);
            out.grad_s(i, c) = (p - (c == target ? 1.0 : 0.0)) / (temperature * m);
        }
    }
    out.value = total / m;
    return out;
}

LossOutput proxy_isa(const Matrix& s, const std::vector<int>& labels,
                     const std::vector<int>& present_classes,
                     const PairWeights& weights, const LossHyper& hyper) {
    hyper.validate();
    check_batch_inputs(s, labels);
    require_same_shape(s, weights.omega_pos, "proxy_isa positive weights");
    require_same_shape(s, weights.omega_neg, "proxy_isa negative weights");
    const std::vector<int> present = sorted_unique(present_classes);

    for (std::size_t i = 0; i < s.rows; ++i) {
        for (std::size_t c = 0; c < s.cols; ++c) {
            const bool pos = labels[i] == static_cast<int>(c + 1);
            const double w = pos ? weights.omega_pos(i, c) : weights.omega_neg(i, c);
            if (!(w > 0.0)) {
                throw InvalidWeightsError("pair weight <= 0 at (" + std::to_string(i) +
                                          ", " + std::to_string(c + 1) + ")");
            }
        }
    }

    // Batch-mean weight per class; classes with no samples on a side stay
    // neutral so an empty class cannot zero a denominator.
    double pos_norm = 0.0;
    for (int cls : present) {
        const std::size_t col = static_cast<std::size_t>(cls - 1);
        double sum = 0.0;
        double count = 0.0;
        for (std::size_t i = 0; i < s.rows; ++i) {
            if (labels[i] == cls) {
                sum += weights.omega_pos(i, col);
                count += 1.0;
            }
        }
        pos_norm += count > 0.0 ? sum / count : 1.0;
    }
    double neg_norm = 0.0;
    for (std::size_t col = 0; col < s.cols; ++col) {
        const int cls = static_cast<int>(col + 1);
        double sum = 0.0;
        double count = 0.0;
        for (std::size_t i = 0; i < s.rows; ++i) {
            if (labels[i] != cls) {
                sum += weights.omega_neg(i, col);
                count += 1.0;
            }
        }
        neg_norm += count > 0.0 ? sum / count : 1.0;
    }

    std::vector<int> all_classes(s.cols);
    for (std::size_t c = 0; c < s.cols; ++c) all_classes[c] = static_cast<int>(c + 1);

    LossOutput out;
    out.grad_s = Matrix(s.rows, s.cols, 0.0);
    out.value = accumulate_side(s, labels, present, /*positive=*/true,
                                &weights.omega_pos, hyper, pos_norm, out.grad_s) +
                accumulate_side(s, labels, all_classes, /*positive=*/false,
                                &weights.omega_neg, hyper, neg_norm, out.grad_s);
    return out;
}

Proposition1Result verify_proposition1(std::span<const double> s_column,
                                       const LossHyper& hyper, PairSide side) {
    hyper.validate();
    std::vector<double> terms(s_column.size());
    std::vector<double> factors(s_column.size());
    for (std::size_t i = 0; i < s_column.size(); ++i) {
        factors[i] = side == PairSide::positive ? hyper.delta - s_column[i]
                                                : s_column[i] + hyper.delta;
        terms[i] = hyper.alpha * factors[i];
    }
    const ShiftedExpSum se = shifted_exp_sum(terms);
    const double log_denom = std::log(se.denominator());

    Proposition1Result out;
    out.lhs = se.log_value();

    // Maximizer: P(i) = e^{t_i}/(1 + sum e^{t_j}); the reserved margin slot
    // holds the remaining mass 1/(1 + sum e^{t_j}).
    double expectation = 0.0;
    double entropy = 0.0;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        const double log_p = (terms[i] - se.shift) - log_denom;
        const double p = std::exp(log_p);
        expectation += p * factors[i];
        entropy -= p * log_p;
    }
    const double log_p_slot = -se.shift - log_denom;
    entropy -= std::exp(log_p_slot) * log_p_slot;
    out.rhs = hyper.alpha * expectation + entropy;
    return out;
}

}  // namespace proxyisa
