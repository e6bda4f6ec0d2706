#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "nlslab/field.hpp"

namespace nlslab {

/// Principal-value rule for  PV int_0^L g(rho) / (r^2 - rho^2) d rho  on a
/// uniform grid rho_j = j h. The pole is removed by subtracting g(r); the
/// smooth remainder is integrated by composite Simpson and the subtracted
/// part is added back in closed form, g(r) ln((L + r)/(L - r)) / (2r).
class PVQuadrature {
 public:
  /// `intervals` is rounded up to an even number.
  PVQuadrature(double length, std::size_t intervals);

  double length() const noexcept { return length_; }
  double spacing() const noexcept { return h_; }
  std::size_t intervals() const noexcept { return nodes_.size() - 1; }
  std::span<const double> nodes() const noexcept { return nodes_; }
  /// Order of the rule on the regularized integrand.
  static constexpr int order = 4;

  /// `g` holds samples at nodes(); g_r and dg_r are g(r) and g'(r), used
  /// for the subtraction and for nodes within 1e-4 h of the pole.
  cplx integrate(std::span<const cplx> g, double r, cplx g_r, cplx dg_r) const;

 private:
  double length_;
  double h_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

/// Max error of the rule against closed forms: g = 1/(1+rho^2), whose PV
/// integral is (atan L + ln((L+r)/(L-r))/(2r)) / (1+r^2), at 32 poles in
/// (0, L).
double pv_selftest(const PVQuadrature& q);
inline constexpr double kPVSelftestTolerance = 1e-4;

enum class Direction { outgoing, incoming };

/// P^{+-} f(r) = f(r)/2 +- (i/pi) PV int_0^inf r^{2-d} f(rho) rho^{d-1} / (r^2 - rho^2) d rho
/// at the grid nodes. The integral is truncated at Rmax; f must be resolved
/// and below 1e-8 of its peak on r >= Rmax/2 (PreconditionFailed). The
/// auxiliary quadrature has 4M intervals and is cached per grid.
RadialField p_out(const RadialField& f);
RadialField p_in(const RadialField& f);
RadialField p_inout(const RadialField& f, Direction dir);

/// P^{+-}_N f = P^{+-}(P_N f). The decay precondition is checked on f: the
/// Littlewood-Paley kernel tail of P_N f itself decays too slowly for it.
RadialField p_band(const RadialField& f, double n, Direction dir);

/// The same operator with no precondition checks, for empirical studies of
/// inputs outside its domain (e.g. P^+ applied to P^+ f).
RadialField p_inout_unchecked(const RadialField& f, Direction dir);

/// The auxiliary rule used for a grid.
const PVQuadrature& pv_quadrature(const GridPtr& grid);

/// Largest |f| on r >= Rmax/2 relative to the peak of |f|.
double outer_tail_ratio(const RadialField& f);
inline constexpr double kInOutTailBound = 1e-8;

/// max over the bank of ||chi_{r >= 1/N} P^{+-} P_{>N} f||_2 / ||f||_2.
double exterior_bound_constant(std::span<const RadialField> bank, double n, Direction dir);

/// 50 test functions: real and chirped Gaussians of several widths, the
/// optional profile `q`, and complex band-limited noise cut off to r <= Rmax/4.
std::vector<RadialField> inout_bank(const GridPtr& grid, const RadialField* q = nullptr,
                                    std::uint64_t seed = 1);

/// ||P^+ P^+ f - P^+ f||_2 / ||P^+ f||_2 (P^+ is not a projection).
double idempotency_defect(const RadialField& f);

}  // namespace nlslab
