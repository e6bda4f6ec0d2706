#include <cmath>
#include <numbers>

#include "doctest.h"
#include "nlslab/error.hpp"
#include "nlslab/exact_solutions.hpp"

using namespace nlslab;

namespace {

const GroundStateSolution& q4() {
  static const GroundStateSolution q = solve_shooting(4);
  return q;
}

RadialField test_field(const GridPtr& g) {
  return sample(g, [](double r) { return cplx(1.0, 0.3) * std::exp(-r * r) + 0.5 * std::exp(-0.3 * r * r); });
}

}  // namespace

TEST_CASE("scaling preserves mass and scales energy by lambda^2") {
  const auto g = default_ground_state_grid(4);
  const auto f = test_field(g);
  CHECK(l2_distance(apply_scaling(f, 1.0), f) == 0.0);
  for (double lam : {0.5, 2.0}) {
    CAPTURE(lam);
    const auto h = apply_scaling(f, lam);
    CHECK(std::abs(mass(h) - mass(f)) <= 1e-8 * mass(f));
    CHECK(energy(h) == doctest::Approx(lam * lam * energy(f)).epsilon(1e-6));
  }
}

TEST_CASE("scaling errors") {
  const auto g = default_ground_state_grid(4);
  const auto f = test_field(g);
  CHECK_THROWS_AS(apply_scaling(f, 0.0), InvalidArgument);
  CHECK_THROWS_AS(apply_scaling(f, 40.0), Unresolved);
  CHECK_THROWS_AS(apply_scaling(f, 0.05), Unresolved);
}

TEST_CASE("phase rotation leaves every norm unchanged") {
  const auto f = test_field(default_ground_state_grid(4));
  const auto h = apply_phase(f, 2.1);
  CHECK(mass(h) == doctest::Approx(mass(f)).epsilon(1e-14));
  CHECK(kinetic(h) == doctest::Approx(kinetic(f)).epsilon(1e-12));
  CHECK(energy(h) == doctest::Approx(energy(f)).epsilon(1e-12));
  CHECK(lp_norm(h, 3.0) == doctest::Approx(lp_norm(f, 3.0)).epsilon(1e-12));
  CHECK(lp_norm(h, INFINITY) == doctest::Approx(lp_norm(f, INFINITY)).epsilon(1e-14));
}

TEST_CASE("soliton modulus, mass and PDE residual") {
  const auto& q = q4();
  for (double lam : {0.8, 1.0, 1.5}) {
    CAPTURE(lam);
    const SymmetryParams p{0.4, lam, 0.0};
    const auto scaled = apply_scaling(q.profile, lam);
    for (double t : {0.0, 0.7, 3.0}) {
      const auto u = soliton(q, t, p);
      double dev = 0.0;
      for (std::size_t k = 0; k < u.size(); ++k) dev = std::max(dev, std::abs(std::abs(u[k]) - std::abs(scaled[k])));
      CHECK(dev <= 1e-13 * q.peak);
      CHECK(mass(u) == doctest::Approx(q.mass).epsilon(1e-9));
      // i u_t = -lambda^2 u
      const auto res = (-lam * lam) * u + laplacian(u) + focusing_term(u);
      CHECK(std::sqrt(mass(res)) <= 1e-5 * std::sqrt(mass(u)));
    }
  }
}

TEST_CASE("pseudo-conformal family: mass, kinetic and potential") {
  const auto& q = q4();
  for (double s : {1.0, 0.5, 0.25}) {
    CAPTURE(s);
    const auto v = pseudoconformal(q, -s, 0.0);
    const auto n = pseudoconformal_norms(q, s);
    CHECK(std::abs(mass(v) - q.mass) <= 1e-8 * q.mass);
    CHECK(kinetic(v) == doctest::Approx(n.kinetic).epsilon(1e-5));
    CHECK(lp_integral(v, critical_exponent(4)) == doctest::Approx(n.potential).epsilon(1e-8));
  }
  CHECK_THROWS_AS(pseudoconformal(q, 1.0, 1.0), InvalidArgument);
}

TEST_CASE("pseudo-conformal family solves the equation") {
  const auto& q = q4();
  const double t = -0.5, h = 1e-4;
  const auto v = pseudoconformal(q, t, 0.0);
  const auto dt = (1.0 / (2.0 * h)) * (pseudoconformal(q, t + h, 0.0) - pseudoconformal(q, t - h, 0.0));
  const auto res = cplx(0.0, 1.0) * dt + laplacian(v) + focusing_term(v);
  CHECK(std::sqrt(mass(res)) <= 1e-5 * kinetic(v) * kinetic(v));
}
