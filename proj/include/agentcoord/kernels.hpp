#pragma once

// Dense double-precision kernels used by every gradient computation in the
// library. Each kernel has a scalar reference implementation and, on x86-64,
// an AVX2 variant selected at runtime.
//
// Elementwise kernels (axpy, scale_sub, sub) round identically on every
// path. Reductions (dot, squared_norm, squared_distance) use a different
// summation order on the vector path and agree with the reference only to
// within a few ulps per term.

#include <cstddef>
#include <span>
#include <string_view>

namespace agentcoord::kernels {

enum class Isa { kScalar, kAvx2 };

std::string_view isa_name(Isa isa);

/// ISA currently used by the dispatching entry points. Defaults to the best
/// supported one, unless AGENTCOORD_ISA=scalar is set in the environment.
Isa active_isa();

/// Overrides the dispatch choice. Requesting an ISA the CPU does not support
/// falls back to scalar. Returns the ISA actually selected.
Isa set_isa(Isa isa);

bool isa_supported(Isa isa);

double dot(std::span<const double> a, std::span<const double> b);
double squared_norm(std::span<const double> a);
double squared_distance(std::span<const double> a, std::span<const double> b);
// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
// y -= beta * x
void scale_sub(double beta, std::span<const double> x, std::span<double> y);
// out = a - b
void sub(std::span<const double> a, std::span<const double> b,
         std::span<double> out);

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
double squared_norm(const double* a, std::size_t n);
double squared_distance(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void scale_sub(double beta, const double* x, double* y, std::size_t n);
void sub(const double* a, const double* b, double* out, std::size_t n);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define AGENTCOORD_HAVE_AVX2_KERNELS 1
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
double squared_norm(const double* a, std::size_t n);
double squared_distance(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void scale_sub(double beta, const double* x, double* y, std::size_t n);
void sub(const double* a, const double* b, double* out, std::size_t n);
}  // namespace avx2
#else
#define AGENTCOORD_HAVE_AVX2_KERNELS 0
#endif

}  // namespace agentcoord::kernels
