// Copyright (c) 2026 the proxyisa authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <string>
#include <vector>

#include "proxyisa/errors.hpp"

namespace proxyisa {

enum class OptimizerKind { adam, sgd };

std::string to_string(OptimizerKind k);
OptimizerKind optimizer_from_string(const std::string& s);

struct OptimizerHyper {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    void validate() const;
};

// Per-tensor optimizer state. adam is the bias-corrected adaptive-moment
// update; sgd subtracts lr * grad directly.
class Optimizer {
public:
    Optimizer(OptimizerKind kind, OptimizerHyper hyper, std::size_t size);

    void step(std::span<double> params, std::span<const double> grads, double lr);

    OptimizerKind kind() const { return kind_; }
    const std::vector<double>& first_moment() const { return m_; }
    const std::vector<double>& second_moment() const { return v_; }
    long long steps_taken() const { return t_; }
    void restore_state(std::vector<double> m, std::vector<double> v, long long t);

private:
    OptimizerKind kind_;
    OptimizerHyper hyper_;
    std::vector<double> m_;
    std::vector<double> v_;
    long long t_ = 0;
};

}  // namespace proxyisa
