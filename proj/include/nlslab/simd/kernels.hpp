#pragma once

// Data-parallel inner loops used by the radial transforms and the propagator.
//
// Every kernel has a portable scalar reference implementation and, on x86-64,
// an AVX2/FMA variant. The active table is chosen once at startup from the
// CPU feature bits; NLSLAB_SIMD=scalar in the environment forces the
// reference path.

#include <complex>
#include <cstddef>
#include <string_view>

namespace nlslab::simd {

using cplx = std::complex<double>;

enum class Isa { scalar, avx2 };

struct KernelTable {
  Isa isa;
  std::string_view name;

  // y[i] = sum_j a[i*cols + j] * x[j]; a is real row-major, x and y complex.
  void (*real_matvec)(const double* a, std::size_t rows, std::size_t cols,
                      const cplx* x, cplx* y);

  // x[i] *= m[i]
  void (*complex_mul)(cplx* x, const cplx* m, std::size_t n);

  // x[i] *= m[i], m real
  void (*real_mul)(cplx* x, const double* m, std::size_t n);

  // sum_i w[i] * |x[i]|^2
  double (*weighted_norm2)(const cplx* x, const double* w, std::size_t n);

  // y[i] += alpha * x[i]
  void (*axpy)(cplx alpha, const cplx* x, cplx* y, std::size_t n);
};

bool isa_available(Isa isa);

// Throws std::invalid_argument if the ISA is not compiled in or not supported.
const KernelTable& kernels(Isa isa);

// The table selected for this process.
const KernelTable& kernels();

namespace detail {
extern const KernelTable scalar_table;
#if defined(NLSLAB_HAVE_AVX2)
extern const KernelTable avx2_table;
#endif
}  // namespace detail

}  // namespace nlslab::simd
