#include "nlslab/exact_solutions.hpp"

#include <cmath>

#include "nlslab/error.hpp"

namespace nlslab {

RadialField apply_scaling(const RadialField& f, double lambda) {
  if (!(lambda > 0.0)) throw InvalidArgument("scaling factor must be positive");
  if (lambda == 1.0) return f;
  RadialField out = dilate(f, lambda);
  const double m0 = mass(f);
  const double m1 = mass(out);
  if (m0 > 0.0 && std::abs(m1 - m0) > 1e-6 * m0)
    throw Unresolved("scaled field leaves the grid (mass not preserved)");
  require_resolved(to_frequency(out), "apply_scaling");
  return out;
}

RadialField apply_phase(const RadialField& f, double theta) { return f * std::polar(1.0, theta); }

RadialField soliton(const GroundStateSolution& q, double t, const SymmetryParams& p) {
  const double lambda = p.scale;
  return apply_phase(apply_scaling(q.profile, lambda), p.phase + lambda * lambda * t);
}

RadialField pseudoconformal(const GroundStateSolution& q, double t, double blowup_time) {
  const double tau = t - blowup_time;
  if (tau == 0.0) throw InvalidArgument("pseudoconformal: t equals the blowup time");
  // |tau|^{-d/2} Q(x/|tau|) is the mass-preserving dilation by 1/|tau|.
  RadialField v = dilate(q.profile, 1.0 / std::abs(tau));
  const auto r = v.grid()->nodes();
  for (std::size_t k = 0; k < v.size(); ++k)
    v[k] *= std::polar(1.0, (r[k] * r[k] - 4.0) / (4.0 * tau));
  const double m0 = q.mass;
  if (std::abs(mass(v) - m0) > 1e-6 * m0)
    throw Unresolved("pseudoconformal: profile leaves the grid");
  require_resolved(to_frequency(v), "pseudoconformal");
  return v;
}

double second_moment(const RadialField& f) {
  const auto r = f.grid()->nodes();
  const auto w = f.grid()->radial_measure();
  double s = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) s += w[k] * r[k] * r[k] * std::norm(f[k]);
  return s;
}

PseudoconformalNorms pseudoconformal_norms(const GroundStateSolution& q, double s) {
  const double xq = second_moment(q.profile);
  return {std::sqrt(q.kinetic_sq / (s * s) + 0.25 * xq), q.potential / (s * s)};
}

}  // namespace nlslab
