#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "nlslab/field.hpp"

namespace nlslab {

/// Radial bump phi: 1 on [0, 1], 0 on [25/24, inf), smooth monotone bridge.
struct BumpCutoff {
  static constexpr double inner = 1.0;
  static constexpr double outer = 25.0 / 24.0;

  double operator()(double x) const;
  /// phi_{<=C}(x) = phi(x / C)
  double le(double x, double c) const { return (*this)(x / c); }
  /// phi_{>C} = 1 - phi_{<=C}
  double gt(double x, double c) const { return 1.0 - le(x, c); }
};

enum class Band { le, annulus, gt, fattened };

/// Samples of the multiplier of P_{<=N}, P_N, P_{>N} or the fattened P~_N
/// at the grid frequencies.
std::vector<double> lp_multiplier(const RadialGrid& grid, Band band, double n);
RadialField lp_project(const RadialField& f, Band band, double n);

enum class Side { le, gt };
RadialField spatial_cutoff(const RadialField& f, double c, Side side);

/// |grad|^s as a Fourier multiplier (s may be negative; the mode nearest
/// zero frequency is never zero on the grid).
RadialField fractional_derivative(const RadialField& f, double s);

/// Radial H with grad H = phi_{<=R} grad f, i.e. H(r) = phi_{<=R}(r) f(r) +
/// int_r^inf phi_{<=R}'(rho) f(rho) d rho; compactly supported in r <= 25R/24.
RadialField gradient_potential(const RadialField& f, double r);

struct ProbeStats {
  double min = 0.0;
  double max = 0.0;
  double median = 0.0;
};

struct BernsteinReport {
  double n, p, q, s;
  ProbeStats derivative;          ///< || |grad|^s P_N f ||_p / (N^s ||P_N f||_p)
  ProbeStats inverse_derivative;  ///< || |grad|^{-s} P_N f ||_p / (N^{-s} ||P_N f||_p)
  ProbeStats lebesgue;            ///< ||P_N f||_q / (N^{d/p - d/q} ||P_N f||_p)
};

/// Random band-limited trial fields at frequency scale N; the trial
/// distribution at N is the dilation of the one at N = 1.
BernsteinReport bernstein_probe(const GridPtr& grid, double n, double p, double q, double s,
                                int trials, std::uint64_t seed = 1);

enum class MismatchKind { real, freq };

struct MismatchParams {
  MismatchKind kind = MismatchKind::real;
  bool gradient = false;  ///< include grad (real: after P_{<=N}; freq: before P_M)
  double r = 1.0;
  double n = 1.0;
  double m_freq = 1.0;    ///< M of the frequency kind
  double m = 2.0;         ///< decay exponent in the bound
  int trials = 20;
  int power_iterations = 60;
  std::uint64_t seed = 1;
};

struct MismatchResult {
  double measured = 0.0;  ///< empirical L^2 operator norm
  double shape = 0.0;     ///< bound without constant: N^{1-m}R^{-m}, max{N,M}^{-m}R^{-m}, ...
};

/// Real kind: phi_{>R} [grad] P_{<=N} phi_{<=R/2}. Frequency kind:
/// P_N phi_{<=R} [grad] P_M, which requires max{N,M} >= 4 min{N,M}.
MismatchResult mismatch_probe(const GridPtr& grid, const MismatchParams& params);

struct ProbeRecord {
  std::string kind;
  std::string params;
  double m;
  double measured;
  double bound;
  double ratio;  ///< measured / bound
};

/// Runs mismatch_probe at each point, fits C on the point `reference` so that
/// the bound there is attained, and reports every point against C * shape.
std::vector<ProbeRecord> mismatch_survey(const GridPtr& grid, const std::vector<MismatchParams>& points,
                                         std::size_t reference = 0);

/// CSV "kind,params,m,measured,bound,ratio".
void write_probe_csv(const std::filesystem::path& path, const std::vector<ProbeRecord>& records);

}  // namespace nlslab
