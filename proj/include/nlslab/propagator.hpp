#pragma once

#include <filesystem>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "nlslab/field.hpp"

namespace nlslab {

struct EvolutionConfig {
  double t0 = 0.0;
  double t1 = 1.0;
  double dt0 = 1e-2;
  double c_nl = 0.1;            ///< dt <= c_nl / ||u||_inf^{4/d}
  double kinetic_max = 0.0;     ///< blowup threshold K_max on ||grad u||_2
  double dt_min = 1e-6;
  double snapshot_interval = 0.0;  ///< 0: snapshots at t0 and the final time only
  double nonlinearity = 1.0;    ///< coefficient of |u|^{4/d} u; 0 gives the free flow

  /// Throws InvalidArgument unless dt_min < dt0, K_max > 0 and t0 < t1.
  void validate() const;
};

struct StepRecord {
  double t;
  double mass;
  double energy;
  double kinetic;
  double linf;
  double spacetime;  ///< S(t)
};

struct Snapshot {
  double t;
  RadialField u;
};

struct Trajectory {
  std::vector<Snapshot> snapshots;
  std::vector<StepRecord> records;
  double nonlinearity = 1.0;

  const GridPtr& grid() const { return snapshots.front().u.grid(); }
  double mass_drift() const;    ///< max relative deviation from the initial mass
  double energy_drift() const;  ///< max |E - E0| / max(|E0|, ||grad u0||^2 / 2)
};

struct BlowupReport {
  bool detected = false;
  std::string trigger;    ///< "kinetic", "step", "unresolved" or empty
  double t_stop = 0.0;
  double t_est = std::numeric_limits<double>::quiet_NaN();
  double rate = std::numeric_limits<double>::quiet_NaN();       ///< alpha
  double prefactor = std::numeric_limits<double>::quiet_NaN();  ///< c
  double fit_residual = std::numeric_limits<double>::quiet_NaN();
};

struct EvolutionResult {
  Trajectory trajectory;
  BlowupReport blowup;
};

/// One Strang step: half free step, exact nonlinear phase, half free step.
RadialField step_strang(const RadialField& u, double dt, double nonlinearity = 1.0);

/// e^{it Delta} f for any real t.
RadialField free_evolution(const RadialField& f, double t);

EvolutionResult evolve(const RadialField& u0, const EvolutionConfig& cfg);

/// Fit ||grad u|| ~ c |T - t|^{-alpha} on the final records with kinetic at
/// least `window` times the last one, minimizing the log-space residual over T.
BlowupReport fit_blowup_rate(const std::vector<StepRecord>& records, double window = 0.25);

/// Relative L^2 defect of the Duhamel formula between snapshot times t0 < t1,
/// with composite Simpson (even, uniform) or trapezoid quadrature in time.
double duhamel_residual(const Trajectory& traj, double t0, double t1);

/// (t, S(t)) for every record.
std::vector<std::pair<double, double>> scattering_norm(const Trajectory& traj);

/// "t,mass,energy,kinetic,linf,S" with one row per record.
void write_run_csv(const std::filesystem::path& path, const Trajectory& traj);

}  // namespace nlslab
