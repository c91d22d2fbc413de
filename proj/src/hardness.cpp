// Copyright (c) 2026 the proxyisa authors
// SPDX-License-Identifier: Apache-2.0
#include "proxyisa/hardness.hpp"

#include <algorithm>
#include <cmath>

namespace proxyisa {

std::string to_string(PositivePenalty p) {
    switch (p) {
        case PositivePenalty::sigma_decay: return "sigma";
        case PositivePenalty::nu_floor: return "nu";
        case PositivePenalty::inverse_effective: return "inverse_effective";
        case PositivePenalty::none: return "none";
    }
    return "sigma";
}

std::string to_string(NegativePenalty p) {
    return p == NegativePenalty::inverse_effective ? "inverse_effective" : "none";
}

PositivePenalty positive_penalty_from_string(const std::string& s) {
    if (s == "sigma") return PositivePenalty::sigma_decay;
    if (s == "nu") return PositivePenalty::nu_floor;
    if (s == "inverse_effective") return PositivePenalty::inverse_effective;
    if (s == "none") return PositivePenalty::none;
    throw ConfigError("unknown positive_penalty '" + s + "'");
}

NegativePenalty negative_penalty_from_string(const std::string& s) {
    if (s == "inverse_effective") return NegativePenalty::inverse_effective;
    if (s == "none") return NegativePenalty::none;
    throw ConfigError("unknown negative_penalty '" + s + "'");
}

void HardnessHyper::validate() const {
    if (!(volume_bound > 1.0)) throw ConfigError("volume_bound must exceed 1");
    if (!(hardness_scale > 0.0)) throw ConfigError("hardness_scale must be positive");
    if (!(sensitivity > 0.0)) throw ConfigError("sensitivity must be positive");
    if (!(margin >= 0.0 && margin <= 1.0)) throw ConfigError("margin must lie in [0, 1]");
    if (!(tau > 0.0)) throw ConfigError("tau must be positive");
}

double effective_number(long long n, const HardnessHyper& hyper) {
    if (n < 0) throw NonMonotoneCountError("negative sample count");
    const double beta = hyper.beta();
    return (1.0 - std::pow(beta, static_cast<double>(n))) / (1.0 - beta);
}

double nu(double e_n) { return 1.0 / (1.0 + std::log1p(e_n)); }

double sigma(double e_n, const HardnessHyper& hyper) {
    const double nu_value = nu(e_n);
    // At e_n = V the denominator collapses to 1 + e^-tau and the whole
    // expression cancels to nu; return that limit exactly.
    if (e_n >= hyper.volume_bound) return nu_value;
    return 1.0 + (1.0 + std::exp(-hyper.tau)) * (nu_value - 1.0) /
                     (1.0 + std::exp(hyper.volume_bound - e_n - hyper.tau));
}

double eta(std::optional<double> s_avg, double nu_value, const HardnessHyper& hyper) {
    if (!s_avg.has_value()) {
        throw InactiveStateError("eta requires an active mean similarity");
    }
    return (1.0 + hyper.sensitivity * (1.0 - hyper.hardness_scale * *s_avg)) * nu_value +
           hyper.margin;
}

bool is_outlier(double s_ic, const ClassState& state) {
    if (!state.active()) {
        throw InactiveStateError("outlier test on inactive class " +
                                 std::to_string(state.class_id));
    }
    return s_ic < state.outlier_boundary();
}

ClassState refresh_state(const ClassState& state, long long n_new,
                         std::optional<double> s_avg_new,
                         const HardnessHyper& hyper) {
    if (n_new < state.n) {
        throw NonMonotoneCountError("class " + std::to_string(state.class_id) +
                                    ": count moved from " + std::to_string(state.n) +
                                    " to " + std::to_string(n_new));
    }
    ClassState out = state;
    out.n = n_new;
    out.e_n = effective_number(n_new, hyper);
    out.nu = nu(out.e_n);
    out.sigma = sigma(out.e_n, hyper);
    out.s_avg = s_avg_new;
    if (s_avg_new.has_value()) {
        out.s_learned = hyper.hardness_scale * *s_avg_new;
        out.eta = eta(s_avg_new, out.nu, hyper);
    } else {
        out.s_learned = 0.0;
        out.eta = 0.0;
    }
    return out;
}

PairWeights pair_weights(const Matrix& s, const std::vector<int>& labels,
                         std::span<const ClassState> states,
                         const HardnessHyper& hyper) {
    if (states.size() < s.cols) {
        throw DimensionMismatchError("pair_weights: state per class required");
    }
    if (labels.size() != s.rows) {
        throw DimensionMismatchError("pair_weights: labels vs similarity rows");
    }
    PairWeights out = unit_pair_weights(s.rows, s.cols);
    for (std::size_t c = 0; c < s.cols; ++c) {
        const ClassState& st = states[c];
        if (!st.active()) continue;  // pre-schedule: every weight stays 1

        double penalty = 1.0;
        switch (hyper.positive_penalty) {
            case PositivePenalty::sigma_decay: penalty = st.sigma; break;
            case PositivePenalty::nu_floor: penalty = st.nu; break;
            case PositivePenalty::inverse_effective:
                penalty = 1.0 / std::max(1.0, st.e_n);
                break;
            case PositivePenalty::none: penalty = 1.0; break;
        }
        const double lower = st.s_learned - st.eta;
        for (std::size_t i = 0; i < s.rows; ++i) {
            const bool positive = labels[i] == static_cast<int>(c + 1);
            if (positive) {
                if (hyper.positive_penalty == PositivePenalty::none) continue;
                const bool in_band = lower <= s(i, c) && s(i, c) <= st.s_learned;
                out.omega_pos(i, c) = in_band ? 1.0 + penalty : penalty;
            } else {
                if (hyper.negative_penalty == NegativePenalty::none) continue;
                if (s(i, c) < lower) {
                    out.omega_neg(i, c) = 1.0 / std::max(1.0, st.e_n);
                }
            }
        }
    }
    return out;
}

}  // namespace proxyisa
