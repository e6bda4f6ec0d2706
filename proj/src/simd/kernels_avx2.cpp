// Compiled with -mavx2 -mfma; only reached after the runtime CPU check.
#include <immintrin.h>

#include "nlslab/simd/kernels.hpp"

namespace nlslab::simd {
namespace {

// (t0,t1,t2,t3) -> (t0,t0,t1,t1) and (t2,t2,t3,t3): widen real coefficients
// to match interleaved complex lanes.
inline __m256d dup_lo(__m256d t) { return _mm256_permute4x64_pd(t, 0x50); }
inline __m256d dup_hi(__m256d t) { return _mm256_permute4x64_pd(t, 0xFA); }

inline cplx hsum_pair(__m256d acc) {
  const __m128d lo = _mm256_castpd256_pd128(acc);
  const __m128d hi = _mm256_extractf128_pd(acc, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  alignas(16) double out[2];
  _mm_store_pd(out, s);
  return {out[0], out[1]};
}

void real_matvec(const double* a, std::size_t rows, std::size_t cols,
                 const cplx* x, cplx* y) {
  const double* xd = reinterpret_cast<const double*>(x);
  const std::size_t vec_cols = cols & ~std::size_t{3};
  for (std::size_t i = 0; i < rows; ++i) {
    const double* row = a + i * cols;
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t j = 0;
    for (; j < vec_cols; j += 4) {
      const __m256d t = _mm256_loadu_pd(row + j);
      acc0 = _mm256_fmadd_pd(dup_lo(t), _mm256_loadu_pd(xd + 2 * j), acc0);
      acc1 = _mm256_fmadd_pd(dup_hi(t), _mm256_loadu_pd(xd + 2 * j + 4), acc1);
    }
    cplx s = hsum_pair(_mm256_add_pd(acc0, acc1));
    for (; j < cols; ++j) s += row[j] * x[j];
    y[i] = s;
  }
}

inline __m256d cmul2(__m256d x, __m256d m) {
  const __m256d mre = _mm256_movedup_pd(m);
  const __m256d mim = _mm256_permute_pd(m, 0xF);
  const __m256d xs = _mm256_permute_pd(x, 0x5);
  return _mm256_fmaddsub_pd(x, mre, _mm256_mul_pd(xs, mim));
}

void complex_mul(cplx* x, const cplx* m, std::size_t n) {
  double* xd = reinterpret_cast<double*>(x);
  const double* md = reinterpret_cast<const double*>(m);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d r = cmul2(_mm256_loadu_pd(xd + 2 * i), _mm256_loadu_pd(md + 2 * i));
    _mm256_storeu_pd(xd + 2 * i, r);
  }
  for (; i < n; ++i) x[i] *= m[i];
}

void real_mul(cplx* x, const double* m, std::size_t n) {
  double* xd = reinterpret_cast<double*>(x);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d t = _mm256_loadu_pd(m + i);
    _mm256_storeu_pd(xd + 2 * i, _mm256_mul_pd(_mm256_loadu_pd(xd + 2 * i), dup_lo(t)));
    _mm256_storeu_pd(xd + 2 * i + 4,
                     _mm256_mul_pd(_mm256_loadu_pd(xd + 2 * i + 4), dup_hi(t)));
  }
  for (; i < n; ++i) x[i] *= m[i];
}

double weighted_norm2(const cplx* x, const double* w, std::size_t n) {
  const double* xd = reinterpret_cast<const double*>(x);
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  if (w) {
    for (; i + 4 <= n; i += 4) {
      const __m256d t = _mm256_loadu_pd(w + i);
      const __m256d a = _mm256_loadu_pd(xd + 2 * i);
      const __m256d b = _mm256_loadu_pd(xd + 2 * i + 4);
      acc0 = _mm256_fmadd_pd(_mm256_mul_pd(a, a), dup_lo(t), acc0);
      acc1 = _mm256_fmadd_pd(_mm256_mul_pd(b, b), dup_hi(t), acc1);
    }
  } else {
    for (; i + 4 <= n; i += 4) {
      const __m256d a = _mm256_loadu_pd(xd + 2 * i);
      const __m256d b = _mm256_loadu_pd(xd + 2 * i + 4);
      acc0 = _mm256_fmadd_pd(a, a, acc0);
      acc1 = _mm256_fmadd_pd(b, b, acc1);
    }
  }
  const cplx h = hsum_pair(_mm256_add_pd(acc0, acc1));
  double s = h.real() + h.imag();
  for (; i < n; ++i) s += (w ? w[i] : 1.0) * std::norm(x[i]);
  return s;
}

void axpy(cplx alpha, const cplx* x, cplx* y, std::size_t n) {
  const double* xd = reinterpret_cast<const double*>(x);
  double* yd = reinterpret_cast<double*>(y);
  const __m256d av = _mm256_setr_pd(alpha.real(), alpha.imag(), alpha.real(), alpha.imag());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d p = cmul2(_mm256_loadu_pd(xd + 2 * i), av);
    _mm256_storeu_pd(yd + 2 * i, _mm256_add_pd(_mm256_loadu_pd(yd + 2 * i), p));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

}  // namespace

namespace detail {
const KernelTable avx2_table{Isa::avx2, "avx2",  real_matvec, complex_mul,
                             real_mul,  weighted_norm2, axpy};
}

}  // namespace nlslab::simd
