#include <random>
#include <vector>

#include "doctest.h"
#include "nlslab/simd/kernels.hpp"

using nlslab::simd::cplx;
using nlslab::simd::Isa;
using nlslab::simd::kernels;

namespace {

std::vector<cplx> random_complex(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::vector<cplx> v(n);
  for (auto& x : v) x = {g(rng), g(rng)};
  return v;
}

std::vector<double> random_real(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::vector<double> v(n);
  for (auto& x : v) x = g(rng);
  return v;
}

double max_rel_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num = std::max(num, std::abs(a[i] - b[i]));
    den = std::max(den, std::abs(a[i]));
  }
  return den > 0 ? num / den : num;
}

}  // namespace

TEST_CASE("scalar table is always available") {
  CHECK(nlslab::simd::isa_available(Isa::scalar));
  CHECK(kernels(Isa::scalar).isa == Isa::scalar);
  CHECK_FALSE(kernels().name.empty());
}

TEST_CASE("avx2 kernels agree with the scalar reference") {
  if (!nlslab::simd::isa_available(Isa::avx2)) {
    MESSAGE("AVX2 not available on this CPU; equivalence test skipped");
    return;
  }
  const auto& ref = kernels(Isa::scalar);
  const auto& vec = kernels(Isa::avx2);
  std::mt19937_64 rng(7);

  for (std::size_t n : {1u, 2u, 3u, 5u, 8u, 17u, 64u, 255u, 512u}) {
    CAPTURE(n);
    SUBCASE("real_matvec") {
      for (std::size_t rows : {1u, 3u, 16u}) {
        const auto a = random_real(rows * n, rng);
        const auto x = random_complex(n, rng);
        std::vector<cplx> y0(rows), y1(rows);
        ref.real_matvec(a.data(), rows, n, x.data(), y0.data());
        vec.real_matvec(a.data(), rows, n, x.data(), y1.data());
        CHECK(max_rel_diff(y0, y1) < 1e-13);
      }
    }
    SUBCASE("complex_mul") {
      auto x0 = random_complex(n, rng);
      auto x1 = x0;
      const auto m = random_complex(n, rng);
      ref.complex_mul(x0.data(), m.data(), n);
      vec.complex_mul(x1.data(), m.data(), n);
      CHECK(max_rel_diff(x0, x1) < 1e-15);
    }
    SUBCASE("real_mul") {
      auto x0 = random_complex(n, rng);
      auto x1 = x0;
      const auto m = random_real(n, rng);
      ref.real_mul(x0.data(), m.data(), n);
      vec.real_mul(x1.data(), m.data(), n);
      CHECK(max_rel_diff(x0, x1) == 0.0);
    }
    SUBCASE("weighted_norm2") {
      const auto x = random_complex(n, rng);
      auto w = random_real(n, rng);
      for (auto& v : w) v = std::abs(v);
      const double a = ref.weighted_norm2(x.data(), w.data(), n);
      const double b = vec.weighted_norm2(x.data(), w.data(), n);
      CHECK(std::abs(a - b) <= 1e-13 * a);
      const double c = ref.weighted_norm2(x.data(), nullptr, n);
      const double e = vec.weighted_norm2(x.data(), nullptr, n);
      CHECK(std::abs(c - e) <= 1e-13 * c);
    }
    SUBCASE("axpy") {
      const auto x = random_complex(n, rng);
      auto y0 = random_complex(n, rng);
      auto y1 = y0;
      const cplx alpha{0.3, -1.7};
      ref.axpy(alpha, x.data(), y0.data(), n);
      vec.axpy(alpha, x.data(), y1.data(), n);
      CHECK(max_rel_diff(y0, y1) < 1e-15);
    }
  }
}
