// Copyright (c) 2026 the proxyisa authors
// SPDX-License-Identifier: Apache-2.0
#include "proxyisa/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "proxyisa/embedding.hpp"
#include "proxyisa/hardness.hpp"
#include "proxyisa/losses.hpp"
#include "proxyisa/memory_queue.hpp"
#include "proxyisa/metrics.hpp"
#include "proxyisa/rng.hpp"

namespace proxyisa {

namespace {

struct Check {
    bool ok = true;
    std::ostringstream detail;

    void expect(bool cond, const std::string& what) {
        if (!cond) {
            if (!ok) detail << "; ";
            detail << what;
            ok = false;
        }
    }
};

// Relative error with a floor so near-zero entries compare absolutely.
double rel_err(double a, double b, double floor_value) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor_value});
}

// Plain cosine used by the gradient suite's finite differences.
double kern_cosine(const Vector& a, const Vector& b) {
    double num = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    return num / std::sqrt(na * nb);
}

struct RandomInstance {
    Matrix s;
    std::vector<int> labels;
    std::vector<int> present;
    LossHyper hyper;
};

RandomInstance random_instance(RandomStream& rng, std::size_t m, std::size_t c) {
    RandomInstance inst;
    inst.s = Matrix(m, c);
    for (double& v : inst.s.data) v = rng.uniform(-1.0, 1.0);
    inst.labels.resize(m);
    for (auto& y : inst.labels) y = 1 + static_cast<int>(rng.uniform_index(c));
    std::vector<int> present(inst.labels);
    std::sort(present.begin(), present.end());
    present.erase(std::unique(present.begin(), present.end()), present.end());
    inst.present = std::move(present);
    inst.hyper.alpha = rng.uniform(2.0, 8.0);
    inst.hyper.delta = rng.uniform(0.0, 0.2);
    return inst;
}

// Central finite differences of a loss over the similarity matrix.
double max_grad_error(const std::function<LossOutput(const Matrix&)>& loss,
                      const Matrix& s) {
    const LossOutput out = loss(s);
    const double h = 1e-6;
    double worst = 0.0;
    Matrix probe = s;
    for (std::size_t idx = 0; idx < s.data.size(); ++idx) {
        probe.data[idx] = s.data[idx] + h;
        const double up = loss(probe).value;
        probe.data[idx] = s.data[idx] - h;
        const double dn = loss(probe).value;
        probe.data[idx] = s.data[idx];
        const double fd = (up - dn) / (2.0 * h);
        worst = std::max(worst, rel_err(out.grad_s.data[idx], fd, 1e-3));
    }
    return worst;
}

SuiteResult suite_proposition1() {
    Check check;
    RandomStream rng(20260810);
    for (int it = 0; it < 300 && check.ok; ++it) {
        LossHyper hyper;
        hyper.alpha = rng.uniform(0.5, 64.0);
        hyper.delta = rng.uniform(0.0, 0.5);
        std::vector<double> sims(rng.uniform_index(41));
        for (double& v : sims) v = rng.uniform(-1.0, 1.0);
        for (PairSide side : {PairSide::positive, PairSide::negative}) {
            const auto r = verify_proposition1(sims, hyper, side);
            check.expect(std::abs(r.lhs - r.rhs) < 1e-9,
                         "identity gap " + std::to_string(std::abs(r.lhs - r.rhs)));
        }
    }
    return {"proposition1", check.ok, check.detail.str()};
}

SuiteResult suite_gradients() {
    Check check;
    RandomStream rng(77002);
    for (int it = 0; it < 30 && check.ok; ++it) {
        RandomInstance inst = random_instance(rng, 6, 4);
        const auto pa = [&](const Matrix& s) {
            return proxy_anchor(s, inst.labels, inst.present, inst.hyper);
        };
        check.expect(max_grad_error(pa, inst.s) < 1e-5, "proxy_anchor gradient");

        PairWeights w = unit_pair_weights(inst.s.rows, inst.s.cols);
        for (double& v : w.omega_pos.data) v = rng.uniform(0.2, 2.0);
        for (double& v : w.omega_neg.data) v = rng.uniform(0.05, 1.0);
        const auto isa = [&](const Matrix& s) {
            return proxy_isa(s, inst.labels, inst.present, w, inst.hyper);
        };
        check.expect(max_grad_error(isa, inst.s) < 1e-5, "weighted loss gradient");

        const auto nsm = [&](const Matrix& s) {
            return normalized_softmax(s, inst.labels, 0.3);
        };
        check.expect(max_grad_error(nsm, inst.s) < 1e-5, "softmax gradient");
    }
    // Cosine backward against finite differences on the raw vectors.
    for (int it = 0; it < 30 && check.ok; ++it) {
        Vector u(8), v(8);
        for (double& x : u) x = rng.uniform(-1.0, 1.0);
        for (double& x : v) x = rng.uniform(-1.0, 1.0);
        const auto cosine = [&](const Vector& a, const Vector& b) {
            return kern_cosine(a, b);
        };
        const CosineGrads g = cosine_backward(u, v, 1.0);
        const double h = 1e-6;
        for (std::size_t j = 0; j < u.size(); ++j) {
            Vector up = u, dn = u;
            up[j] += h;
            dn[j] -= h;
            const double fd = (cosine(up, v) - cosine(dn, v)) / (2.0 * h);
            check.expect(rel_err(g.grad_u[j], fd, 1e-3) < 1e-5, "cosine grad_u");
        }
    }
    return {"gradients", check.ok, check.detail.str()};
}

SuiteResult suite_sigma_bounds() {
    Check check;
    HardnessHyper hyper;
    for (double tau : {0.5, 1.5, 5.0}) {
        hyper.tau = tau;
        double prev = 2.0;
        for (int i = 0; i <= 2000; ++i) {
            const double e_n = hyper.volume_bound * i / 2000.0;
            const double s = sigma(e_n, hyper);
            check.expect(s <= 1.0 + 1e-15 && s >= nu(e_n) - 1e-15,
                         "sigma outside [nu, 1] at e_n=" + std::to_string(e_n));
            check.expect(s <= prev + 1e-15, "sigma increased at e_n=" + std::to_string(e_n));
            prev = s;
        }
        check.expect(sigma(hyper.volume_bound, hyper) == nu(hyper.volume_bound),
                     "sigma(V) != nu(V)");
    }
    // Effective-number limit and the band width falling as progress grows.
    check.expect(effective_number(459, hyper) >= 0.99 * hyper.volume_bound,
                 "effective number misses its limit");
    double prev_eta = 1e300;
    for (int i = 0; i <= 500; ++i) {
        const double e_n = hyper.volume_bound * i / 500.0;
        const double width = eta(0.5, nu(e_n), hyper);
        check.expect(width < prev_eta, "eta not strictly decreasing");
        prev_eta = width;
    }
    return {"sigma-bounds", check.ok, check.detail.str()};
}

SuiteResult suite_queue_fifo() {
    Check check;
    RandomStream rng(5150);
    MemoryQueue queue(17);
    std::vector<std::pair<Vector, int>> replay;  // brute-force mirror
    for (int op = 0; op < 500 && check.ok; ++op) {
        const std::size_t m = 1 + rng.uniform_index(6);
        EmbeddingBatch batch;
        batch.embeddings = Matrix(m, 3);
        batch.labels.resize(m);
        std::vector<bool> mask(m);
        for (std::size_t i = 0; i < m; ++i) {
            auto row = batch.embeddings.row(i);
            for (double& x : row) x = rng.normal();
            l2_normalize_in_place(row);
            batch.labels[i] = 1 + static_cast<int>(rng.uniform_index(4));
            mask[i] = rng.uniform() < 0.3;
            if (!mask[i]) replay.emplace_back(Vector(row.begin(), row.end()),
                                              batch.labels[i]);
        }
        queue.enqueue_clean(batch, mask);
        while (replay.size() > queue.capacity()) replay.erase(replay.begin());

        check.expect(queue.size() == replay.size(), "size drifted from replay");
        for (int cls = 1; cls <= 4; ++cls) {
            std::size_t count = 0;
            for (const auto& [vec, label] : replay) count += label == cls;
            check.expect(queue.class_count(cls) == count, "per-class count drifted");
        }
        std::size_t k = 0;
        for (const auto& entry : queue.entries()) {
            check.expect(entry.embedding == replay[k].first &&
                             entry.label == replay[k].second,
                         "entry order differs from arrival order");
            ++k;
        }
    }
    return {"queue-fifo", check.ok, check.detail.str()};
}

SuiteResult suite_metrics_oracle() {
    Check check;
    RandomStream rng(90210);
    for (int it = 0; it < 20 && check.ok; ++it) {
        const std::size_t n = 24;
        Matrix pts(n, 5);
        std::vector<int> labels(n);
        for (std::size_t i = 0; i < n; ++i) {
            auto row = pts.row(i);
            for (double& x : row) x = rng.normal();
            l2_normalize_in_place(row);
            labels[i] = 1 + static_cast<int>(i % 4);
        }
        // Exhaustive oracle: full sort per query, plain loops.
        for (int k : {1, 2, 4}) {
            std::size_t hits = 0;
            double ap_total = 0.0;
            for (std::size_t q = 0; q < n; ++q) {
                std::vector<std::pair<double, std::size_t>> order;
                for (std::size_t j = 0; j < n; ++j) {
                    if (j == q) continue;
                    double sim = 0.0;
                    for (std::size_t t = 0; t < pts.cols; ++t) sim += pts(q, t) * pts(j, t);
                    order.emplace_back(-sim, j);
                }
                std::sort(order.begin(), order.end());
                bool hit = false;
                for (int r = 0; r < k && r < static_cast<int>(order.size()); ++r) {
                    hit = hit || labels[order[r].second] == labels[q];
                }
                hits += hit;
                std::size_t rel = 0;
                double prec = 0.0;
                const std::size_t r_q = 5;  // 6 per class, minus the query
                for (std::size_t r = 0; r < r_q; ++r) {
                    if (labels[order[r].second] == labels[q]) {
                        ++rel;
                        prec += static_cast<double>(rel) / static_cast<double>(r + 1);
                    }
                }
                ap_total += prec / static_cast<double>(r_q);
            }
            const double want_recall = static_cast<double>(hits) / static_cast<double>(n);
            check.expect(std::abs(recall_at_k(pts, labels, k) - want_recall) < 1e-12,
                         "recall differs from oracle");
            check.expect(std::abs(map_at_r(pts, labels) - ap_total / n) < 1e-12,
                         "map differs from oracle");
        }
    }
    return {"metrics-oracle", check.ok, check.detail.str()};
}

}  // namespace

std::vector<std::string> selftest_suite_names() {
    return {"proposition1", "gradients", "sigma-bounds", "queue-fifo",
            "metrics-oracle"};
}

SuiteResult run_selftest_suite(const std::string& name) {
    if (name == "proposition1") return suite_proposition1();
    if (name == "gradients") return suite_gradients();
    if (name == "sigma-bounds") return suite_sigma_bounds();
    if (name == "queue-fifo") return suite_queue_fifo();
    if (name == "metrics-oracle") return suite_metrics_oracle();
    throw ConfigError("unknown verify suite '" + name + "'");
}

int run_selftests(const std::string& filter, std::ostream& out) {
    bool all_passed = true;
    bool any_selected = false;
    for (const std::string& name : selftest_suite_names()) {
        if (!filter.empty() && name != filter) continue;
        any_selected = true;
        const SuiteResult result = run_selftest_suite(name);
        out << (result.passed ? "[PASS] " : "[FAIL] ") << result.name;
        if (!result.passed) out << "  (" << result.detail << ")";
        out << "\n";
        all_passed = all_passed && result.passed;
    }
    if (!any_selected) {
        out << "no suite matches filter '" << filter << "'\n";
        return 2;
    }
    return all_passed ? 0 : 1;
}

}  // namespace proxyisa
