#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "nlslab/field.hpp"

namespace nlslab {

/// The ground state Q of  Delta Q + Q^{1+4/d} = Q  sampled on a grid, with
/// the norms that the variational theory is built on.
struct GroundStateSolution {
  RadialField profile;
  std::string method;
  double peak = 0.0;          ///< Q(0)
  double mass = 0.0;          ///< M(Q) = ||Q||_2^2
  double kinetic_sq = 0.0;    ///< ||grad Q||_2^2
  double potential = 0.0;     ///< ||Q||_{2(d+2)/d}^{2(d+2)/d}
  double energy = 0.0;        ///< E(Q)
  double residual = 0.0;      ///< ||Delta Q + Q^{1+4/d} - Q||_2
  double gn_constant = 0.0;   ///< (d+2)/d * ||Q||_2^{-4/d}

  int dimension() const { return profile.grid()->dimension(); }
  const GridPtr& grid() const { return profile.grid(); }
  double l2() const { return std::sqrt(mass); }
};

/// Tolerances of the certified invariants.
struct GroundStateTolerance {
  double relative_residual = 1e-8;  ///< rho / ||Q||_2
  double relative_energy = 1e-6;    ///< |E(Q)| / ||grad Q||_2^2
};

/// Measures the norms of a candidate profile and checks positivity,
/// monotone decay, the elliptic residual and E(Q) = 0. Throws
/// CertificationFailed naming the first violated invariant.
GroundStateSolution certify_ground_state(RadialField profile, std::string method,
                                         GroundStateTolerance tol = {});

/// Grid used when a solver is called with a dimension only.
GridPtr default_ground_state_grid(int d);

/// Shooting from r = 0 on Q(0), bisecting between overshoot (Q crosses zero
/// with Q' < 0) and undershoot (Q' > 0 while Q > 0) until the bracket is
/// narrower than `tol`.
GroundStateSolution solve_shooting(GridPtr grid, double tol = 1e-14);
GroundStateSolution solve_shooting(int d, double tol = 1e-14);

struct GradientFlowOptions {
  double dtau = 0.5;
  double tol = 1e-10;          ///< stop when the relative residual of Delta P + P^{1+4/d} = mu P is below
  int max_steps = 20000;
  double seed_amplitude = 1.0;  ///< seed is amplitude * e^{-r^2}
  double seed_width = 1.0;
};

struct GradientFlowHistory {
  std::vector<double> weinstein;  ///< scale-invariant GN quotient per step
  std::vector<double> mu;
  std::vector<double> residual;
};

/// Normalized imaginary-time flow (semi-implicit, stabilized by the current
/// eigenvalue estimate). Each step renormalizes the amplitude so that the
/// iterate has zero energy; the fixed point satisfies Delta P + P^{1+4/d} = mu P
/// and is finally dilated to mu = 1.
GroundStateSolution solve_gradient_flow(GridPtr grid, GradientFlowOptions opts = {},
                                        GradientFlowHistory* history = nullptr);

/// ||f||_2^{4/d} ||grad f||_2^2 / ||f||_p^p, minimized exactly on the orbit of Q.
double weinstein_quotient(const RadialField& f);

/// (d+2)/d (||f||_2/||Q||_2)^{4/d} ||grad f||_2^2 - ||f||_p^p  (>= 0).
double gn_deficit(const RadialField& f, const GroundStateSolution& q);
/// Right-hand side of the sharp Gagliardo-Nirenberg inequality.
double gn_rhs(const RadialField& f, const GroundStateSolution& q);

/// |f|^{4/d} f
RadialField focusing_term(const RadialField& f);

void write_certificate(const std::filesystem::path& json_path, const GroundStateSolution& q,
                       const std::filesystem::path& snapshot_path);

}  // namespace nlslab
