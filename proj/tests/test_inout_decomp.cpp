#include <boost/math/special_functions/expint.hpp>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "nlslab/error.hpp"
#include "nlslab/ground_state.hpp"
#include "nlslab/inout_decomp.hpp"
#include "nlslab/propagator.hpp"
#include "nlslab/spectral_ops.hpp"

using namespace nlslab;

namespace {

GridPtr grid4() { return RadialGrid::make(4, 1024, 40.0); }

double rel(const RadialField& a, const RadialField& b) { return l2_distance(a, b) / std::sqrt(mass(b)); }

RadialField conj(const RadialField& f) {
  auto g = f;
  for (auto& v : g.values()) v = std::conj(v);
  return g;
}

}  // namespace

TEST_CASE("PV rule against closed forms") {
  CHECK(pv_selftest(pv_quadrature(grid4())) <= kPVSelftestTolerance);

  const double coarse = pv_selftest(PVQuadrature(30.0, 32));
  const double fine = pv_selftest(PVQuadrature(30.0, 64));
  CHECK(fine <= 0.5 * coarse);
  CHECK(pv_selftest(PVQuadrature(30.0, 33)) == doctest::Approx(pv_selftest(PVQuadrature(30.0, 34))));

  // Integrand (r^2 - rho^2) / (1+rho^2)^2 / (r^2 - rho^2): no singularity left.
  const PVQuadrature q(30.0, 4096);
  const double l = q.length();
  const double exact = 0.5 * (std::atan(l) + l / (1.0 + l * l));
  for (double r : {0.37, 2.9, 17.3}) {
    std::vector<cplx> g(q.nodes().size());
    for (std::size_t j = 0; j < g.size(); ++j) {
      const double rho = q.nodes()[j];
      g[j] = (r * r - rho * rho) / ((1.0 + rho * rho) * (1.0 + rho * rho));
    }
    const double dg = -2.0 * r / ((1.0 + r * r) * (1.0 + r * r));
    CHECK(std::abs(q.integrate(g, r, 0.0, dg) - exact) <= 1e-8);
  }

  CHECK_THROWS_AS(PVQuadrature(0.0, 10), InvalidArgument);
  CHECK_THROWS_AS(PVQuadrature(1.0, 1), InvalidArgument);
  std::vector<cplx> g(q.nodes().size());
  CHECK_THROWS_AS(q.integrate(g, 0.0, 0.0, 0.0), InvalidArgument);
  CHECK_THROWS_AS(q.integrate(g, l, 0.0, 0.0), InvalidArgument);
}

TEST_CASE("P+ of a Gaussian matches the exponential-integral form") {
  // For d = 4 and f = e^{-r^2}: PV int rho^3 e^{-rho^2} / (r^2 - rho^2) = (r^2 e^{-r^2} Ei(r^2) - 1) / 2.
  const auto g = grid4();
  const auto f = sample(g, [](double r) { return cplx(std::exp(-r * r)); });
  const auto p = p_out(f);
  double err = 0.0, scale = 0.0;
  for (std::size_t k = 0; k < g->size(); ++k) {
    const double r = g->nodes()[k];
    const double x = r * r;
    double scaled = 0.0;  // x e^{-x} Ei(x)
    if (x < 40.0) {
      scaled = x * std::exp(-x) * boost::math::expint(x);
    } else {
      double term = 1.0;
      for (int j = 0; j < 12; ++j, term *= j / x) scaled += term;
    }
    const double pv = 0.5 * (scaled - 1.0);
    const cplx exact(0.5 * std::exp(-x), pv / (std::numbers::pi * x));
    err = std::max(err, std::abs(p[k] - exact));
    scale = std::max(scale, std::abs(exact));
  }
  CHECK(err <= 1e-6 * scale);
}

TEST_CASE("in/out identity on the test bank") {
  const auto g = grid4();
  const auto q = solve_shooting(g);
  const auto bank = inout_bank(g, &q.profile);
  REQUIRE(bank.size() == 50);
  double worst = 0.0;
  for (const auto& f : bank) worst = std::max(worst, rel(p_out(f) + p_in(f), f));
  CHECK(worst <= 1e-3);
}

TEST_CASE("conjugate symmetry and linearity") {
  const auto g = grid4();
  const auto f = sample(g, [](double r) { return cplx(std::exp(-0.5 * r * r) * std::cos(2.0 * r)); });
  CHECK(l2_distance(p_in(f), conj(p_out(f))) <= 1e-12 * std::sqrt(mass(p_out(f))));

  const auto h = sample(g, [](double r) { return cplx(0.0, std::exp(-r * r)); });
  const cplx alpha(0.3, -1.2), beta(2.0, 0.5);
  const auto lhs = p_out(alpha * f + beta * h);
  const auto rhs = alpha * p_out(f) + beta * p_out(h);
  CHECK(l2_distance(lhs, rhs) <= 1e-12 * std::sqrt(mass(rhs)));
}

TEST_CASE("free evolution turns a Gaussian outgoing") {
  const auto g = RadialGrid::make(4, 1024, 100.0);
  const auto g0 = sample(g, [](double r) { return cplx(std::exp(-0.5 * r * r)); });
  const auto ratio = [](const RadialField& u) { return std::sqrt(mass(p_in(u)) / mass(u)); };
  double prev = ratio(g0);
  for (double t : {0.5, 1.0, 2.0, 4.0}) {
    const double cur = ratio(free_evolution(g0, t));
    CHECK(cur <= prev);
    prev = cur;
  }
  CHECK(ratio(free_evolution(g0, 2.0)) < ratio(g0));
}

TEST_CASE("banded decomposition") {
  const auto g = grid4();
  const auto f = sample(g, [](double r) { return cplx(std::exp(-r * r) * (1.0 + r)); });
  for (double n : {1.0, 2.0, 4.0}) {
    const auto pn = lp_project(f, Band::annulus, n);
    const auto sum = p_band(f, n, Direction::outgoing) + p_band(f, n, Direction::incoming);
    CHECK(rel(sum, pn) <= 1e-3);
  }

  // No content in the annulus around N = 16.
  const auto wide = sample(g, [](double r) { return cplx(std::exp(-r * r / 9.0)); });
  const auto out = p_band(wide, 16.0, Direction::outgoing);
  CHECK(std::sqrt(mass(out)) <= 1e-6 * std::sqrt(mass(wide)));

  CHECK_THROWS_AS(p_band(f, 0.0, Direction::outgoing), InvalidArgument);
}

TEST_CASE("exterior bound is uniform in N") {
  const auto g = grid4();
  const auto bank = inout_bank(g);
  double lo = 1e300, hi = 0.0;
  for (double n : {1.0, 2.0, 4.0, 8.0}) {
    const double c = exterior_bound_constant(bank, n, Direction::outgoing);
    MESSAGE("N = " << n << "  C = " << c);
    CHECK(std::isfinite(c));
    lo = std::min(lo, c);
    hi = std::max(hi, c);
  }
  CHECK(lo > 0.0);
  CHECK(hi <= 3.0 * lo);
}

TEST_CASE("preconditions") {
  const auto g = grid4();
  const auto slow = sample(g, [](double r) { return cplx(1.0 / (1.0 + r * r)); });
  CHECK_THROWS_AS(p_out(slow), PreconditionFailed);
  CHECK_THROWS_AS(p_band(slow, 1.0, Direction::incoming), PreconditionFailed);
  std::vector<RadialField> bank{slow};
  CHECK_THROWS_AS(exterior_bound_constant(bank, 1.0, Direction::outgoing), PreconditionFailed);

  std::vector<cplx> spike(g->size());
  spike[10] = 1.0;
  CHECK_THROWS_AS(p_out(RadialField(g, spike)), Unresolved);
  CHECK(outer_tail_ratio(RadialField::zero(g)) == 0.0);
}

TEST_CASE("P+ is not idempotent") {
  const auto g = grid4();
  const auto f = sample(g, [](double r) { return cplx(std::exp(-r * r)); });
  const double defect = idempotency_defect(f);
  MESSAGE("||P+P+f - P+f|| / ||P+f|| = " << defect);
  CHECK(std::isfinite(defect));
  CHECK(defect > 0.0);
}
