// Copyright (c) 2026 the proxyisa authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>

namespace proxyisa::kern {

// Instruction set backing the dispatched kernels below.
enum class Isa { scalar, avx2, neon };

const char* isa_name(Isa isa);

// The ISA selected at startup. Picks the widest supported lane width unless
// the PROXY_ISA_KERNEL environment variable (scalar|avx2|neon|auto) forces a
// choice; forcing an unsupported ISA falls back to scalar. The selection is
// made once, so a process is bit-reproducible run to run.
Isa active_isa();

// Dispatched kernels. All take unaliased buffers of length n.
double dot(const double* a, const double* b, std::size_t n);
double squared_norm(const double* a, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);  // y += alpha*x
void scale(double alpha, double* x, std::size_t n);                  // x *= alpha

// Scalar reference kernels with a fixed left-to-right accumulation order.
// The SIMD variants are equivalence-tested against these.
namespace ref {
double dot(const double* a, const double* b, std::size_t n);
double squared_norm(const double* a, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void scale(double alpha, double* x, std::size_t n);
}  // namespace ref

#if defined(PROXYISA_HAVE_AVX2_TU)
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
double squared_norm(const double* a, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void scale(double alpha, double* x, std::size_t n);
}  // namespace avx2
bool avx2_supported();
#endif

#if defined(PROXYISA_HAVE_NEON_TU)
namespace neon {
double dot(const double* a, const double* b, std::size_t n);
double squared_norm(const double* a, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void scale(double alpha, double* x, std::size_t n);
}  // namespace neon
#endif

}  // namespace proxyisa::kern
