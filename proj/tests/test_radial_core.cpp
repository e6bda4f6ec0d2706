#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "doctest.h"
#include "nlslab/error.hpp"
#include "nlslab/field.hpp"
#include "nlslab/snapshot.hpp"

using namespace nlslab;
using std::numbers::pi;

namespace {

GridPtr grid4() { return RadialGrid::make(4, 512, 30.0); }

RadialField gaussian(const GridPtr& g, double a = 1.0) {
  return sample(g, [a](double r) { return cplx(std::exp(-a * r * r)); });
}

// Random field whose spectrum occupies the lower half of the band.
RadialField random_bandlimited(const GridPtr& g, std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  std::vector<cplx> b(g->size());
  for (std::size_t m = 0; m < b.size() / 2; ++m) b[m] = {n(rng), n(rng)};
  return to_physical(spectral_from_unitary(g, b));
}

double rel_l2(const RadialField& a, const RadialField& b) {
  return l2_distance(a, b) / std::sqrt(mass(b));
}

}  // namespace

TEST_CASE("make_grid rejects invalid parameters") {
  CHECK_THROWS_AS(RadialGrid::make(0, 512, 30.0), InvalidArgument);
  CHECK_THROWS_AS(RadialGrid::make(4, 15, 30.0), InvalidArgument);
  CHECK_THROWS_AS(RadialGrid::make(4, 512, 0.0), InvalidArgument);
  CHECK_THROWS_AS(RadialGrid::make(4, 512, -1.0), InvalidArgument);
}

TEST_CASE("grid invariants") {
  for (int d : {1, 2, 3, 4, 5}) {
    CAPTURE(d);
    const auto g = RadialGrid::make(d, 64, 20.0);
    const auto r = g->nodes();
    const auto xi = g->frequencies();
    const auto w = g->weights();
    CHECK(r[0] > 0.0);
    for (std::size_t k = 1; k < g->size(); ++k) {
      CHECK(r[k] > r[k - 1]);
      CHECK(xi[k] > xi[k - 1]);
      CHECK(w[k] > 0.0);
    }
    CHECK(r.back() < g->rmax());
    CHECK(g->orthogonality_defect() < 1e-13);
  }
}

TEST_CASE("transform is unitary: roundtrip and Plancherel") {
  const auto g = grid4();
  SUBCASE("Gaussian") {
    const auto f = gaussian(g);
    const auto fh = to_frequency(f);
    CHECK(rel_l2(to_physical(fh), f) <= 1e-10);
    const double nf = std::sqrt(mass(f));
    double spectral_mass = 0.0;
    const auto mu = g->spectral_measure();
    for (std::size_t m = 0; m < fh.size(); ++m) spectral_mass += mu[m] * std::norm(fh[m]);
    const double nh = std::sqrt(spectral_mass);
    CHECK(std::abs(nf - nh) / nf <= 1e-10);
  }
  SUBCASE("100 random band-limited fields") {
    std::mt19937_64 rng(11);
    double worst_roundtrip = 0.0, worst_plancherel = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      const auto f = random_bandlimited(g, rng);
      const auto fh = to_frequency(f);
      worst_roundtrip = std::max(worst_roundtrip, rel_l2(to_physical(fh), f));
      const auto b = unitary_coordinates(fh);
      double s = 0;
      for (const auto& v : b) s += std::norm(v);
      worst_plancherel =
          std::max(worst_plancherel, std::abs(std::sqrt(mass(f)) - std::sqrt(s)) / std::sqrt(mass(f)));
    }
    CHECK(worst_roundtrip <= 1e-10);
    CHECK(worst_plancherel <= 1e-10);
  }
  SUBCASE("small grid is still unitary") {
    const auto gs = RadialGrid::make(4, 16, 10.0);
    std::mt19937_64 rng(3);
    const auto f = random_bandlimited(gs, rng);
    CHECK(rel_l2(to_physical(to_frequency(f)), f) <= 1e-10);
  }
}

TEST_CASE("Gaussian transforms to a Gaussian") {
  // Unitary Fourier transform: e^{-r^2} -> 2^{-d/2} e^{-xi^2/4}.
  for (int d : {2, 3, 4}) {
    CAPTURE(d);
    const auto g = RadialGrid::make(d, 512, 30.0);
    const auto fh = to_frequency(gaussian(g));
    double worst = 0.0;
    const auto xi = g->frequencies();
    for (std::size_t m = 0; m < fh.size(); ++m) {
      const double expect = std::pow(2.0, -0.5 * d) * std::exp(-0.25 * xi[m] * xi[m]);
      worst = std::max(worst, std::abs(fh[m] - expect));
    }
    CHECK(worst <= 1e-10);
  }
}

TEST_CASE("zero field maps to zero") {
  const auto g = grid4();
  const auto z = RadialField::zero(g);
  const auto zh = to_frequency(z);
  for (const auto& v : zh.values()) CHECK(v == cplx(0.0));
  CHECK(mass(z) == 0.0);
  CHECK(kinetic(z) == 0.0);
}

TEST_CASE("mass and L^p norms of Gaussians") {
  const auto g = grid4();
  CHECK(mass(gaussian(g)) == doctest::Approx(pi * pi / 4).epsilon(1e-8));
  for (double a : {0.5, 1.0, 2.0, 4.0}) {
    CAPTURE(a);
    // int e^{-2a|x|^2} dx over R^4 = (pi/(2a))^2
    const double expect = std::pow(pi / (2 * a), 2.0);
    CHECK(std::abs(mass(gaussian(g, a)) - expect) <= 1e-8 * expect);
  }
  for (int d : {1, 2, 3, 5}) {
    CAPTURE(d);
    const auto gd = RadialGrid::make(d, 256, 20.0);
    const double expect = std::pow(pi / 2, 0.5 * d);
    CHECK(std::abs(mass(gaussian(gd)) - expect) <= 1e-8 * expect);
  }
  // int e^{-3|x|^2} = (pi/3)^2
  CHECK(lp_integral(gaussian(g), 3.0) == doctest::Approx(std::pow(pi / 3, 2)).epsilon(1e-10));
  CHECK(lp_norm(gaussian(g), 3.0) == doctest::Approx(std::pow(pi / 3, 2.0 / 3)).epsilon(1e-10));
  CHECK(lp_norm(gaussian(g), INFINITY) == doctest::Approx(1.0).epsilon(1e-2));
  CHECK_THROWS_AS(lp_norm(gaussian(g), 0.5), InvalidArgument);
}

TEST_CASE("kinetic and energy of a Gaussian") {
  const auto g = grid4();
  // ||grad e^{-r^2}||^2 = d (pi/2)^{d/2} = pi^2 in d = 4
  CHECK(kinetic(gaussian(g)) == doctest::Approx(pi).epsilon(1e-10));
  const double e = 0.5 * pi * pi - (1.0 / 3.0) * std::pow(pi / 3, 2);
  CHECK(energy(gaussian(g)) == doctest::Approx(e).epsilon(1e-10));
  CHECK(norm(gaussian(g), NormKind::energy) == doctest::Approx(e).epsilon(1e-10));
  CHECK(norm(gaussian(g), NormKind::mass) == doctest::Approx(pi * pi / 4).epsilon(1e-8));
}

TEST_CASE("laplacian") {
  const auto g = grid4();
  SUBCASE("of a Gaussian matches (4r^2 - 2d) e^{-r^2}") {
    const auto lap = laplacian(gaussian(g));
    const auto r = g->nodes();
    double err = 0.0, scale = 0.0;
    for (std::size_t k = 0; k < g->size() && r[k] <= g->rmax() / 2; ++k) {
      const double exact = (4 * r[k] * r[k] - 8) * std::exp(-r[k] * r[k]);
      err = std::max(err, std::abs(lap[k] - exact));
      scale = std::max(scale, std::abs(exact));
    }
    CHECK(err / scale <= 1e-6);
  }
  SUBCASE("of zero is zero") {
    const auto lap = laplacian(RadialField::zero(g));
    CHECK(mass(lap) == 0.0);
  }
  SUBCASE("of a pure frequency mode is -xi^2 times the mode") {
    const std::size_t k = 40;
    std::vector<cplx> b(g->size());
    b[k] = 1.0;
    const auto mode = to_physical(spectral_from_unitary(g, b));
    const auto out = unitary_coordinates(to_frequency(laplacian(mode)));
    const double xi = g->frequencies()[k];
    for (std::size_t m = 0; m < out.size(); ++m) {
      const cplx expect = m == k ? cplx(-xi * xi) : cplx(0.0);
      CHECK(std::abs(out[m] - expect) <= 1e-10 * xi * xi);
    }
  }
  SUBCASE("is linear") {
    std::mt19937_64 rng(5);
    const auto f = random_bandlimited(g, rng);
    const auto h = gaussian(g, 2.0);
    const cplx alpha{0.7, -0.2}, beta{-1.3, 0.4};
    const auto lhs = laplacian(alpha * f + beta * h);
    const auto rhs = alpha * laplacian(f) + beta * laplacian(h);
    // Relative to the operator scale: |xi|^2 up to half the band.
    CHECK(l2_distance(lhs, rhs) <=
          1e-12 * std::pow(g->band_limit(), 2) * (std::sqrt(mass(f)) + std::sqrt(mass(h))));
  }
  SUBCASE("rejects an unresolved field") {
    std::vector<cplx> b(g->size());
    b[g->size() - 3] = 1.0;
    const auto rough = to_physical(spectral_from_unitary(g, b));
    CHECK_FALSE(is_resolved(rough));
    CHECK_THROWS_AS(laplacian(rough), Unresolved);
    CHECK_THROWS_AS(kinetic(rough), Unresolved);
    CHECK_THROWS_AS(energy(rough), Unresolved);
  }
}

TEST_CASE("radial derivative and band-limited evaluation") {
  const auto g = grid4();
  const auto f = gaussian(g);
  const auto df = radial_derivative(f);
  const auto r = g->nodes();
  double err = 0.0;
  for (std::size_t k = 0; k < g->size(); ++k)
    err = std::max(err, std::abs(df[k] - (-2 * r[k] * std::exp(-r[k] * r[k]))));
  CHECK(err <= 1e-9);

  const std::vector<double> pts{0.0, 0.123, 1.0, 2.5, 7.0, 31.0};
  const auto vals = evaluate(f, pts);
  for (std::size_t i = 0; i < pts.size(); ++i)
    CHECK(std::abs(vals[i] - std::exp(-pts[i] * pts[i])) <= 1e-10);

  const std::vector<double> freqs{0.0, 0.5, 3.0, 10.0};
  const auto spec = evaluate_spectrum(f, freqs);
  for (std::size_t i = 0; i < freqs.size(); ++i)
    CHECK(std::abs(spec[i] - 0.25 * std::exp(-0.25 * freqs[i] * freqs[i])) <= 1e-10);
}

TEST_CASE("fields on different grids do not mix") {
  const auto a = gaussian(grid4());
  const auto b = gaussian(RadialGrid::make(4, 256, 30.0));
  CHECK_THROWS_AS(a + b, GridMismatch);
  CHECK_THROWS_AS(inner(a, b), GridMismatch);
  CHECK_THROWS_AS(RadialField(grid4(), std::vector<cplx>(3)), InvalidArgument);
  CHECK_THROWS_AS(RadialField(grid4(), std::vector<cplx>(512, cplx(NAN))), InvalidArgument);
}

TEST_CASE("snapshot file round-trips bit-exactly") {
  const auto g = RadialGrid::make(4, 64, 12.0);
  const auto f = sample(g, [](double r) { return std::polar(std::exp(-r), 0.3 * r * r); });
  std::stringstream io;
  write_snapshot(io, f);
  std::string header;
  std::getline(io, header);
  CHECK(header == "4 64 12");
  io.seekg(0);
  const auto back = read_snapshot(io);
  for (std::size_t k = 0; k < f.size(); ++k) CHECK(back[k] == f[k]);

  std::stringstream bad("4 64\n");
  CHECK_THROWS_AS(read_snapshot(bad), Error);
  std::stringstream wrong_nodes("4 16 12\n0.5 1 0\n");
  CHECK_THROWS_AS(read_snapshot(wrong_nodes), Error);
}
