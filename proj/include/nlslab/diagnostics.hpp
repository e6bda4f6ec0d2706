#pragma once

#include <filesystem>
#include <limits>
#include <span>
#include <vector>

#include "nlslab/ground_state.hpp"
#include "nlslab/propagator.hpp"

namespace nlslab {

/// psi(|x|/R) with psi = 1 on [0, 1], 0 on [2, inf).
struct VirialCutoff {
  double radius = 1.0;
  double operator()(double r) const;
  double derivative(double r) const;
};

/// V_R = int |x|^2 psi(|x|/R) |u|^2 dx
double virial(const RadialField& u, double radius);
/// dV_R/dt = 2 Im int grad[|x|^2 psi(|x|/R)] . conj(u) grad u dx
double virial_rate(const RadialField& u, double radius);

struct VirialAccelReport {
  std::vector<double> times;              ///< interior snapshot times
  std::vector<double> second_difference;  ///< central second difference of V_R
  std::vector<double> target;             ///< 16 E(u) at the same snapshots
  double max_deviation = 0.0;             ///< max |second difference - 16E|
  double scale = 0.0;                     ///< 16 max(|E|, ||grad u||^2 / 2) at the first snapshot
  double relative_deviation = 0.0;        ///< max_deviation / scale
};

/// Needs >= 5 equally spaced snapshots and mass outside R below 1% of the
/// total on each; otherwise PreconditionFailed. E uses the trajectory's
/// nonlinearity coefficient.
VirialAccelReport virial_accel_check(const Trajectory& traj, double radius);

struct ExteriorNorms {
  double mass = 0.0;     ///< ||u||_{L^2(r > R)}
  double kinetic = 0.0;  ///< ||d_r u||_{L^2(r > R)}
};
/// Sharp restriction by node masking.
ExteriorNorms exterior_norms(const RadialField& u, double radius);

/// Ladder of the frequency scale: 2^{k/8}.
inline constexpr int kLadderStepsPerOctave = 8;

/// Smallest ladder value N with int_{|xi| <= N} |uhat|^2 >= M(u) / 2.
double frequency_scale(const RadialField& u);

struct CompactnessEntry {
  double eta = 0.0;
  double c = 0.0;                 ///< max over snapshots
  std::vector<double> per_snapshot;
};
/// Smallest C with, on every snapshot, mass beyond r = C/N(t) and frequency
/// mass beyond C N(t) both at most eta M. eta must lie in (0, 1].
CompactnessEntry compactness_modulus(const Trajectory& traj, double eta);

struct LocalConstancy {
  double value = 0.0;  ///< min over pairs of N(t1) <t1 - t2>^{1/2} / N(t2)
  bool flagged = false;
};
inline constexpr double kLocalConstancyFlag = 1e-3;
/// Needs >= 3 snapshots.
LocalConstancy local_constancy_probe(const Trajectory& traj);

struct ProfileDistance {
  double delta = 0.0;   ///< ||e^{i theta} lambda^{d/2} u(lambda x) - Q||_{H^1}
  double theta = 0.0;   ///< in (-pi, pi]
  double lambda = 0.0;  ///< ||grad Q|| / ||grad u||
};
ProfileDistance profile_distance(const RadialField& u, const GroundStateSolution& q);

struct DiagnosticsOptions {
  double virial_radius = 10.0;
  double exterior_radius = 5.0;
};

struct DiagnosticsReport {
  DiagnosticsOptions options;
  std::vector<double> t;
  std::vector<double> virial;
  std::vector<double> virial_rate;
  std::vector<double> virial_accel;  ///< central second difference; NaN at the ends or on uneven spacing
  std::vector<double> energy16;
  std::vector<double> m_out;
  std::vector<double> k_out;
  std::vector<double> frequency_scale;
  std::vector<double> profile_distance;  ///< NaN when no ground state is supplied
  std::vector<CompactnessEntry> compactness;  ///< eta = 0.1, 0.01, 0.001
  LocalConstancy local_constancy;
  double frequency_exponent = 0.0;  ///< slope of log N against -log|T - t| (0 without a blowup fit)
};

/// All diagnostics on every snapshot. `q` may be null; `blowup_time` (if
/// finite) enables the N(t) ~ |T - t|^{-1} fit.
DiagnosticsReport diagnose(const Trajectory& traj, const GroundStateSolution* q,
                           DiagnosticsOptions opts = {},
                           double blowup_time = std::numeric_limits<double>::quiet_NaN());

/// Least-squares slope of log N(t) against -log|T - t|.
double frequency_blowup_exponent(std::span<const double> t, std::span<const double> n, double blowup_time);

/// "t,virial,virial_rate,virial_accel,energy16,m_out,k_out,N,delta"
void write_diagnostics_csv(const std::filesystem::path& path, const DiagnosticsReport& r);
/// Fits, C(eta) table and probe minima.
void write_diagnostics_summary(const std::filesystem::path& path, const DiagnosticsReport& r);

}  // namespace nlslab
