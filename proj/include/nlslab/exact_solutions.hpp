#pragma once

#include "nlslab/ground_state.hpp"

namespace nlslab {

/// Phase, scale and blowup time of the symmetry orbit of Q.
struct SymmetryParams {
  double phase = 0.0;        ///< theta_0 in [0, 2 pi)
  double scale = 1.0;        ///< lambda_0 > 0
  double blowup_time = 0.0;  ///< T, used by the pseudo-conformal family
};

/// lambda^{d/2} f(lambda x). Throws Unresolved if the result leaves the
/// resolvable band or loses mass through the outer boundary.
RadialField apply_scaling(const RadialField& f, double lambda);
/// e^{i theta} f
RadialField apply_phase(const RadialField& f, double theta);

/// e^{i theta_0} e^{i lambda_0^2 t} lambda_0^{d/2} Q(lambda_0 x)
RadialField soliton(const GroundStateSolution& q, double t, const SymmetryParams& p = {});

/// |t-T|^{-d/2} exp(i (|x|^2 - 4) / (4 (t-T))) Q(x / (t-T)); blows up at t = T.
RadialField pseudoconformal(const GroundStateSolution& q, double t, double blowup_time);

/// Closed-form norms of the pseudo-conformal solution at distance s = |t-T|
/// from blowup, from the norms of Q.
struct PseudoconformalNorms {
  double kinetic;    ///< ||grad v||_2 = (||grad Q||^2 / s^2 + ||x Q||^2 / 4)^{1/2}
  double potential;  ///< ||v||_p^p = ||Q||_p^p / s^2
};
PseudoconformalNorms pseudoconformal_norms(const GroundStateSolution& q, double s);

/// ||x Q||_2^2
double second_moment(const RadialField& f);

}  // namespace nlslab
