// Copyright (c) 2026 the proxyisa authors
// SPDX-License-Identifier: Apache-2.0
#include "proxyisa/optimizer.hpp"

#include <cmath>

namespace proxyisa {

std::string to_string(OptimizerKind k) {
    return k == OptimizerKind::adam ? "adam" : "sgd";
}

OptimizerKind optimizer_from_string(const std::string& s) {
    if (s == "adam") return OptimizerKind::adam;
    if (s == "sgd") return OptimizerKind::sgd;
    throw ConfigError("unknown optimizer '" + s + "'");
}

void OptimizerHyper::validate() const {
    if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
        throw ConfigError("adam betas must lie in [0, 1)");
    }
    if (!(epsilon > 0.0)) throw ConfigError("adam epsilon must be positive");
}

Optimizer::Optimizer(OptimizerKind kind, OptimizerHyper hyper, std::size_t size)
    : kind_(kind), hyper_(hyper) {
    hyper_.validate();
    if (kind_ == OptimizerKind::adam) {
        m_.assign(size, 0.0);
        v_.assign(size, 0.0);
    }
}

void Optimizer::step(std::span<double> params, std::span<const double> grads,
                     double lr) {
    if (params.size() != grads.size()) {
        throw ShapeMismatchError("optimizer: params size " +
                                 std::to_string(params.size()) + " vs grads size " +
                                 std::to_string(grads.size()));
    }
    if (kind_ == OptimizerKind::sgd) {
        for (std::size_t i = 0; i < params.size(); ++i) params[i] -= lr * grads[i];
        return;
    }
    if (params.size() != m_.size()) {
        throw ShapeMismatchError("optimizer: state sized for " +
                                 std::to_string(m_.size()) + " parameters");
    }
    ++t_;
    const double bc1 = 1.0 - std::pow(hyper_.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(hyper_.beta2, static_cast<double>(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
        m_[i] = hyper_.beta1 * m_[i] + (1.0 - hyper_.beta1) * grads[i];
        v_[i] = hyper_.beta2 * v_[i] + (1.0 - hyper_.beta2) * grads[i] * grads[i];
        const double m_hat = m_[i] / bc1;
        const double v_hat = v_[i] / bc2;
        params[i] -= lr * m_hat / (std::sqrt(v_hat) + hyper_.epsilon);
    }
}

void Optimizer::restore_state(std::vector<double> m, std::vector<double> v,
                              long long t) {
    if (kind_ == OptimizerKind::adam &&
        (m.size() != m_.size() || v.size() != v_.size())) {
        throw ShapeMismatchError("optimizer restore: state size mismatch");
    }
    m_ = std::move(m);
    v_ = std::move(v);
    t_ = t;
}

}  // namespace proxyisa
