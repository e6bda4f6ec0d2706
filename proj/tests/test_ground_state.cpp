#include <cmath>
#include <fstream>
#include <random>

#include "doctest.h"
#include "nlslab/error.hpp"
#include "nlslab/exact_solutions.hpp"
#include "nlslab/ground_state.hpp"

using namespace nlslab;

namespace {

const GroundStateSolution& q4() {
  static const GroundStateSolution q = solve_shooting(4);
  return q;
}

const GroundStateSolution& q4_flow() {
  static const GroundStateSolution q = solve_gradient_flow(default_ground_state_grid(4));
  return q;
}

RadialField gaussian(const GridPtr& g, double a = 1.0, cplx amp = 1.0) {
  return sample(g, [=](double r) { return amp * std::exp(-a * r * r); });
}

}  // namespace

TEST_CASE("shooting certifies E(Q) = 0 and the Pohozaev balance") {
  const auto& q = q4();
  CHECK(std::abs(q.energy) <= 1e-6 * q.kinetic_sq);
  CHECK(std::abs(q.kinetic_sq - 4.0 / 6.0 * q.potential) <= 1e-6 * q.kinetic_sq);
  CHECK(q.residual <= 1e-8 * q.l2());
  CHECK(q.gn_constant == doctest::Approx(1.5 / std::sqrt(q.mass)).epsilon(1e-14));
  CHECK(q.peak > 1.0);
}

TEST_CASE("shooting and gradient flow agree") {
  const auto& a = q4();
  const auto& b = q4_flow();
  CHECK(std::abs(a.mass - b.mass) <= 1e-5 * a.mass);
  CHECK(l2_distance(a.profile, b.profile) <= 1e-5 * a.l2());
  CHECK(b.residual <= 1e-8 * b.l2());
}

TEST_CASE("gradient flow is insensitive to the seed") {
  const auto g = default_ground_state_grid(4);
  for (double amp : {0.5, 2.0}) {
    for (double width : {0.7, 1.5}) {
      CAPTURE(amp);
      CAPTURE(width);
      GradientFlowOptions o;
      o.seed_amplitude = amp;
      o.seed_width = width;
      const auto q = solve_gradient_flow(g, o);
      CHECK(std::abs(q.mass - q4().mass) <= 1e-6 * q4().mass);
    }
  }
}

TEST_CASE("gradient flow decreases the Weinstein quotient") {
  GradientFlowHistory h;
  GradientFlowOptions o;
  o.seed_width = 2.0;
  solve_gradient_flow(default_ground_state_grid(4), o, &h);
  REQUIRE(h.weinstein.size() > 3);
  for (std::size_t i = 1; i < h.weinstein.size(); ++i)
    CHECK(h.weinstein[i] <= h.weinstein[i - 1] * (1.0 + 1e-12));
  // J(Q) = M(Q)^{2/d} * d/(d+2)
  CHECK(h.weinstein.back() == doctest::Approx(std::sqrt(q4().mass) * 4.0 / 6.0).epsilon(1e-8));
}

TEST_CASE("final rescale preserves the mass") {
  const auto& q = q4();
  for (double lam : {0.8, 1.25}) CHECK(mass(dilate(q.profile, lam)) == doctest::Approx(q.mass).epsilon(1e-10));
}

TEST_CASE("solver argument errors") {
  CHECK_THROWS_AS(solve_shooting(4, 0.0), InvalidArgument);
  CHECK_THROWS_AS(solve_shooting(4, 1e-3), InvalidArgument);
  GradientFlowOptions o;
  o.dtau = 0.0;
  CHECK_THROWS_AS(solve_gradient_flow(default_ground_state_grid(4), o), InvalidArgument);
  o = {};
  o.max_steps = 3;
  CHECK_THROWS_AS(solve_gradient_flow(default_ground_state_grid(4), o), NotConverged);
}

TEST_CASE("certification rejects non-ground-states") {
  const auto g = default_ground_state_grid(4);
  CHECK_THROWS_AS(certify_ground_state(gaussian(g), "test"), CertificationFailed);
  CHECK_THROWS_AS(certify_ground_state(gaussian(g, 1.0, -1.0), "test"), CertificationFailed);
  CHECK_THROWS_AS(certify_ground_state(gaussian(g, 1.0, cplx(0.0, 1.0)), "test"), CertificationFailed);
}

TEST_CASE("sharp GN deficit vanishes on the orbit of Q") {
  const auto& q = q4();
  CHECK(std::abs(gn_deficit(q.profile, q)) <= 1e-6 * gn_rhs(q.profile, q));
  const auto f = apply_phase(apply_scaling(q.profile, 2.0), 1.3);
  CHECK(std::abs(gn_deficit(f, q)) <= 1e-6 * gn_rhs(f, q));
  const auto h = 0.7 * q.profile;
  CHECK(std::abs(gn_deficit(h, q)) <= 1e-6 * gn_rhs(h, q));
}

TEST_CASE("sharp GN deficit on Gaussians and random mixtures") {
  const auto& q = q4();
  const auto g = q.grid();
  const auto gauss = gaussian(g);
  CHECK(gn_deficit(gauss, q) > 1e-3 * gn_rhs(gauss, q));

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> width(0.3, 3.0), amp(-2.0, 2.0), phase(0.0, 6.283);
  double worst = INFINITY;
  for (int trial = 0; trial < 200; ++trial) {
    const int terms = 1 + trial % 4;
    std::vector<double> a(terms), c(terms), th(terms);
    for (int j = 0; j < terms; ++j) {
      const double w = width(rng);
      a[j] = 1.0 / (w * w);
      c[j] = amp(rng);
      th[j] = phase(rng);
    }
    const auto f = sample(g, [&](double r) {
      cplx s = 0.0;
      for (int j = 0; j < terms; ++j) s += std::polar(c[j], th[j]) * std::exp(-a[j] * r * r);
      return s;
    });
    if (mass(f) == 0.0) continue;
    worst = std::min(worst, gn_deficit(f, q) / gn_rhs(f, q));
  }
  CHECK(worst >= -1e-8);
}

TEST_CASE("GN deficit scales as lambda^2") {
  const auto& q = q4();
  const auto f = gaussian(q.grid(), 0.8, cplx(1.0, 0.5)) + gaussian(q.grid(), 3.0, 0.4);
  const double base = gn_deficit(f, q);
  for (double lam : {0.5, 2.0})
    CHECK(gn_deficit(apply_scaling(f, lam), q) == doctest::Approx(lam * lam * base).epsilon(1e-6));
  CHECK_THROWS_AS(gn_deficit(RadialField::zero(q.grid()), q), InvalidArgument);
}

TEST_CASE("certificate is written as JSON") {
  const auto dir = std::filesystem::temp_directory_path() / "nlslab_cert_test";
  std::filesystem::create_directories(dir);
  write_certificate(dir / "q.json", q4(), dir / "q.snap");
  std::ifstream in(dir / "q.json");
  std::string text((std::istreambuf_iterator<char>(in)), {});
  CHECK(text.find("\"gn_constant\"") != std::string::npos);
  CHECK(text.find("\"snapshot\": \"q.snap\"") != std::string::npos);
  std::filesystem::remove_all(dir);
}
