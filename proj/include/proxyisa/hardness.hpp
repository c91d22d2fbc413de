// Copyright (c) 2026 the proxyisa authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "proxyisa/linalg.hpp"
#include "proxyisa/losses.hpp"

namespace proxyisa {

// Which penalty value the out-of-band positive weight takes. sigma_decay is
// the full method; the others exist for the ablation grid.
enum class PositivePenalty { sigma_decay, nu_floor, inverse_effective, none };
enum class NegativePenalty { inverse_effective, none };

std::string to_string(PositivePenalty p);
std::string to_string(NegativePenalty p);
PositivePenalty positive_penalty_from_string(const std::string& s);
NegativePenalty negative_penalty_from_string(const std::string& s);

struct HardnessHyper {
    double volume_bound = 100.0;  // V, upper bound of the effective number
    double hardness_scale = 0.15; // h, scales the mean clean similarity
    double sensitivity = 0.9;     // k, how strongly hardness widens the band
    double margin = 0.1;          // lambda, additive band width
    double tau = 1.5;             // decay timing
    PositivePenalty positive_penalty = PositivePenalty::sigma_decay;
    NegativePenalty negative_penalty = NegativePenalty::inverse_effective;

    double beta() const { return (volume_bound - 1.0) / volume_bound; }
    void validate() const;
};

// Per-class learning state. s_avg (and the thresholds derived from it) stays
// inactive until the memory queue has produced at least one estimate.
struct ClassState {
    int class_id = 0;
    long long n = 0;       // clean samples of this class enqueued so far
    double e_n = 0.0;      // effective number of n
    std::optional<double> s_avg;
    double s_learned = 0.0;  // h * s_avg, meaningful only when active
    double eta = 0.0;        // informative band width, meaningful only when active
    double nu = 1.0;
    double sigma = 1.0;

    bool active() const { return s_avg.has_value(); }
    double outlier_boundary() const { return s_learned - eta; }
};

// Effective number (1 - beta^n) / (1 - beta), beta = (V-1)/V. Grows from 0
// toward V; used as a per-class training progress bar.
double effective_number(long long n, const HardnessHyper& hyper);

// Lower bound 1/(1 + ln(1 + e_n)) protecting positive weights from vanishing.
double nu(double e_n);

// Decay 1 + (1+e^-tau)(nu-1)/(1+e^{V-e_n-tau}); slides from 1 toward nu(V) as
// e_n approaches V, collapsing to nu exactly at the bound.
double sigma(double e_n, const HardnessHyper& hyper);

// Informative search length (1 + k(1 - h*s_avg)) * nu + lambda. Applied as
// written even when the resulting band exits [-1, 1].
double eta(std::optional<double> s_avg, double nu_value, const HardnessHyper& hyper);

// True when a positive similarity falls strictly below the outlier boundary
// s_learned - eta. InactiveStateError before the state has statistics.
bool is_outlier(double s_ic, const ClassState& state);

// State with n advanced to n_new and thresholds recomputed from s_avg_new.
// NonMonotoneCountError if n_new < state.n.
ClassState refresh_state(const ClassState& state, long long n_new,
                         std::optional<double> s_avg_new,
                         const HardnessHyper& hyper);

// Dynamic weights for every pair in the batch:
//   positive: 1 + penalty inside [s_learned - eta, s_learned] (inclusive),
//             penalty outside; penalty = sigma under the full method
//   negative: 1/max(1, e_n) strictly below s_learned - eta, else 1
// Classes whose state is inactive contribute 1 everywhere. `states` is
// indexed by class id minus one and must cover every class column of s.
PairWeights pair_weights(const Matrix& s, const std::vector<int>& labels,
                         std::span<const ClassState> states,
                         const HardnessHyper& hyper);

}  // namespace proxyisa
