// Copyright (c) 2026 the proxyisa authors
// SPDX-License-Identifier: Apache-2.0
#include "proxyisa/kernels.hpp"

#include <cstdlib>
#include <string>

namespace proxyisa::kern {

namespace ref {

double dot(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

double squared_norm(const double* a, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * a[i];
    return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale(double alpha, double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

}  // namespace ref

namespace {

struct Table {
    double (*dot)(const double*, const double*, std::size_t);
    double (*squared_norm)(const double*, std::size_t);
    void (*axpy)(double, const double*, double*, std::size_t);
    void (*scale)(double, double*, std::size_t);
    Isa isa;
};

constexpr Table kScalarTable{ref::dot, ref::squared_norm, ref::axpy, ref::scale,
                             Isa::scalar};

Table select_table() {
    const char* env = std::getenv("PROXY_ISA_KERNEL");
    const std::string mode = env ? env : "auto";
    if (mode == "scalar") return kScalarTable;
#if defined(PROXYISA_HAVE_AVX2_TU)
    if ((mode == "auto" || mode == "avx2") && avx2_supported()) {
        return Table{avx2::dot, avx2::squared_norm, avx2::axpy, avx2::scale,
                     Isa::avx2};
    }
#endif
#if defined(PROXYISA_HAVE_NEON_TU)
    if (mode == "auto" || mode == "neon") {
        return Table{neon::dot, neon::squared_norm, neon::axpy, neon::scale,
                     Isa::neon};
    }
#endif
    return kScalarTable;
}

const Table& table() {
    static const Table t = select_table();
    return t;
}

}  // namespace

const char* isa_name(Isa isa) {
    switch (isa) {
        case Isa::scalar: return "scalar";
        case Isa::avx2: return "avx2";
        case Isa::neon: return "neon";
    }
    return "unknown";
}

Isa active_isa() { return table().isa; }

double dot(const double* a, const double* b, std::size_t n) {
    return table().dot(a, b, n);
}

double squared_norm(const double* a, std::size_t n) {
    return table().squared_norm(a, n);
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    table().axpy(alpha, x, y, n);
}

void scale(double alpha, double* x, std::size_t n) {
    table().scale(alpha, x, n);
}

}  // namespace proxyisa::kern
