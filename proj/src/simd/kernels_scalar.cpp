#include "nlslab/simd/kernels.hpp"

namespace nlslab::simd {
namespace {

void real_matvec(const double* a, std::size_t rows, std::size_t cols,
                 const cplx* x, cplx* y) {
  for (std::size_t i = 0; i < rows; ++i) {
    const double* row = a + i * cols;
    double re = 0.0, im = 0.0;
    for (std::size_t j = 0; j < cols; ++j) {
      re += row[j] * x[j].real();
      im += row[j] * x[j].imag();
    }
    y[i] = {re, im};
  }
}

void complex_mul(cplx* x, const cplx* m, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double xr = x[i].real(), xi = x[i].imag();
    const double mr = m[i].real(), mi = m[i].imag();
    x[i] = {xr * mr - xi * mi, xr * mi + xi * mr};
  }
}

void real_mul(cplx* x, const double* m, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= m[i];
}

double weighted_norm2(const cplx* x, const double* w, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double a2 = x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
    s += (w ? w[i] : 1.0) * a2;
  }
  return s;
}

void axpy(cplx alpha, const cplx* x, cplx* y, std::size_t n) {
  const double ar = alpha.real(), ai = alpha.imag();
  for (std::size_t i = 0; i < n; ++i) {
    const double xr = x[i].real(), xi = x[i].imag();
    y[i] += cplx{ar * xr - ai * xi, ar * xi + ai * xr};
  }
}

}  // namespace

namespace detail {
const KernelTable scalar_table{Isa::scalar, "scalar",  real_matvec, complex_mul,
                               real_mul,    weighted_norm2, axpy};
}

}  // namespace nlslab::simd
