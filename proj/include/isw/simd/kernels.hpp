#pragma once

// Data-parallel inner loops used by the distance and inference code.
//
// Each kernel has a scalar reference implementation and, where the target
// supports it, an AVX2+FMA (x86-64) or NEON (aarch64) variant. The variant is
// picked once at runtime from CPU features; ISW_SIMD=scalar|avx2|neon in the
// environment or set_backend() overrides the choice. Vector variants reorder
// the floating-point sums, so they agree with scalar to rounding, not bitwise.

#include <cstddef>
#include <span>
#include <string_view>

namespace isw::simd {

enum class Backend { scalar, avx2, neon };

std::string_view backend_name(Backend b) noexcept;

// True when the backend is compiled in and the CPU can run it.
bool backend_available(Backend b) noexcept;

Backend active_backend() noexcept;

// Throws isw::InvalidArgument if the backend is unavailable.
void set_backend(Backend b);

struct KernelTable {
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*squared_distance)(const double* a, const double* b, std::size_t n);
  void (*accumulate)(double* acc, const double* x, std::size_t n);
};

// Kernel table for a specific backend (for equivalence tests).
const KernelTable& kernels_for(Backend b);

// Sum of a[i] * b[i]. Spans must have equal length.
double dot(std::span<const double> a, std::span<const double> b);

// Sum of (a[i] - b[i])^2.
double squared_distance(std::span<const double> a, std::span<const double> b);

// acc[i] += x[i].
void accumulate(std::span<double> acc, std::span<const double> x);

namespace detail {
const KernelTable& scalar_table() noexcept;
const KernelTable* avx2_table() noexcept;  // nullptr when not compiled in
const KernelTable* neon_table() noexcept;
}  // namespace detail

}  // namespace isw::simd
