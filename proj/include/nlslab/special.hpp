#pragma once

#include <boost/math/special_functions/bessel.hpp>
#include <cmath>

namespace nlslab::special {

/// x^{-nu} J_nu(a x), continuous at x = 0.
inline double scaled_bessel_j(double nu, double a, double x) {
  const double z = a * x;
  if (std::abs(z) < 1e-8) return std::pow(0.5 * a, nu) / std::tgamma(nu + 1.0);
  return std::pow(x, -nu) * boost::math::cyl_bessel_j(nu, z);
}

/// C-infinity step: 0 for t <= 0, 1 for t >= 1, monotone in between, built
/// from the e^{-1/t} glue.
inline double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / t);
  const double b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

inline double smooth_step_derivative(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  const double a = std::exp(-1.0 / t);
  const double b = std::exp(-1.0 / (1.0 - t));
  const double s = a + b;
  return a * b * (1.0 / (t * t) + 1.0 / ((1.0 - t) * (1.0 - t))) / (s * s);
}

/// Radial cutoff equal to 1 on [0, inner], 0 on [outer, inf), smooth and
/// non-increasing in between.
inline double bump(double r, double inner, double outer) {
  return 1.0 - smooth_step((r - inner) / (outer - inner));
}

inline double bump_derivative(double r, double inner, double outer) {
  return -smooth_step_derivative((r - inner) / (outer - inner)) / (outer - inner);
}

}  // namespace nlslab::special
