#include "nlslab/propagator.hpp"

#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <fstream>
#include <iomanip>

#include "nlslab/error.hpp"
#include "nlslab/simd/kernels.hpp"

namespace nlslab {

void EvolutionConfig::validate() const {
  if (!(t1 > t0)) throw InvalidArgument("evolution span must have t1 > t0");
  if (!(dt0 > 0.0) || !(dt_min > 0.0) || !(dt_min < dt0))
    throw InvalidArgument("evolution steps must satisfy 0 < dt_min < dt0");
  if (!(kinetic_max > 0.0)) throw InvalidArgument("blowup threshold K_max must be positive");
  if (!(c_nl > 0.0)) throw InvalidArgument("adaptivity constant must be positive");
  if (snapshot_interval < 0.0) throw InvalidArgument("snapshot interval must be non-negative");
}

double Trajectory::mass_drift() const {
  double worst = 0.0;
  const double m0 = records.front().mass;
  for (const auto& r : records) worst = std::max(worst, std::abs(r.mass - m0) / m0);
  return worst;
}

double Trajectory::energy_drift() const {
  const auto& first = records.front();
  const double scale = std::max(std::abs(first.energy), 0.5 * first.kinetic * first.kinetic);
  double worst = 0.0;
  for (const auto& r : records) worst = std::max(worst, std::abs(r.energy - first.energy) / scale);
  return worst;
}

namespace {

// Split-step integrator in unitary coordinates: a = s (.) u on the physical
// side, b = U a on the spectral side, so both sub-steps are isometries.
class SplitStep {
 public:
  SplitStep(GridPtr grid, double nonlinearity)
      : grid_(std::move(grid)),
        nl_(nonlinearity),
        power_(nonlinear_power(grid_->dimension())),
        p_(critical_exponent(grid_->dimension())),
        n_(grid_->size()),
        phase_(n_),
        b_(n_) {}

  std::vector<cplx> load(const RadialField& u) const { return unitary_coordinates(u); }

  // Advances a by dt; leaves the final spectral coordinates in spectral().
  void step(std::vector<cplx>& a, double dt) {
    const auto& k = simd::kernels();
    const double* U = grid_->transform_matrix().data();
    const auto xi = grid_->frequencies();
    const auto s = grid_->physical_scale();
    if (dt != last_dt_) {
      for (std::size_t m = 0; m < n_; ++m) phase_[m] = std::polar(1.0, -0.5 * xi[m] * xi[m] * dt);
      last_dt_ = dt;
    }
    k.real_matvec(U, n_, n_, a.data(), b_.data());
    k.complex_mul(b_.data(), phase_.data(), n_);
    k.real_matvec(U, n_, n_, b_.data(), a.data());
    if (nl_ != 0.0) {
      for (std::size_t i = 0; i < n_; ++i) {
        const double amp = std::abs(a[i]) / s[i];
        a[i] *= std::polar(1.0, dt * nl_ * std::pow(amp, power_));
      }
    }
    k.real_matvec(U, n_, n_, a.data(), b_.data());
    k.complex_mul(b_.data(), phase_.data(), n_);
    k.real_matvec(U, n_, n_, b_.data(), a.data());
  }

  const std::vector<cplx>& spectral() const { return b_; }

  double tail() const {
    const std::size_t start = n_ - std::max<std::size_t>(1, n_ / 10);
    const auto& k = simd::kernels();
    const double total = k.weighted_norm2(b_.data(), nullptr, n_);
    return total == 0.0 ? 0.0 : k.weighted_norm2(b_.data() + start, nullptr, n_ - start) / total;
  }

  // mass, kinetic, potential and sup norm from a and the matching b.
  StepRecord measure(double t, const std::vector<cplx>& a, const std::vector<cplx>& b) const {
    const auto xi = grid_->frequencies();
    const auto s = grid_->physical_scale();
    const auto w = grid_->radial_measure();
    double mass = 0.0, k2 = 0.0, pot = 0.0, linf = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      mass += std::norm(a[i]);
      k2 += xi[i] * xi[i] * std::norm(b[i]);
      const double amp = std::abs(a[i]) / s[i];
      pot += w[i] * std::pow(amp, p_);
      linf = std::max(linf, amp);
    }
    const double d = grid_->dimension();
    return {t, mass, 0.5 * k2 - nl_ * d / (2.0 * (d + 2.0)) * pot, std::sqrt(k2), linf, pot};
  }

  std::vector<cplx> to_spectral(const std::vector<cplx>& a) const {
    std::vector<cplx> b(n_);
    simd::kernels().real_matvec(grid_->transform_matrix().data(), n_, n_, a.data(), b.data());
    return b;
  }

 private:
  GridPtr grid_;
  double nl_, power_, p_;
  std::size_t n_;
  std::vector<cplx> phase_, b_;
  double last_dt_ = std::numeric_limits<double>::quiet_NaN();
};

}  // namespace

RadialField step_strang(const RadialField& u, double dt, double nonlinearity) {
  if (!(dt > 0.0)) throw InvalidArgument("step size must be positive");
  require_resolved(to_frequency(u), "step_strang input");
  SplitStep stepper(u.grid(), nonlinearity);
  auto a = stepper.load(u);
  stepper.step(a, dt);
  if (!(stepper.tail() < kResolvedTail)) throw Unresolved("step_strang: result is not resolved");
  return from_unitary(u.grid(), a);
}

RadialField free_evolution(const RadialField& f, double t) {
  const auto& grid = *f.grid();
  const auto xi = grid.frequencies();
  std::vector<cplx> phase(xi.size());
  for (std::size_t m = 0; m < phase.size(); ++m) phase[m] = std::polar(1.0, -xi[m] * xi[m] * t);
  auto b = unitary_coordinates(to_frequency(f));
  simd::kernels().complex_mul(b.data(), phase.data(), b.size());
  return to_physical(spectral_from_unitary(f.grid(), b));
}

EvolutionResult evolve(const RadialField& u0, const EvolutionConfig& cfg) {
  cfg.validate();
  require_resolved(to_frequency(u0), "evolve initial data");
  const GridPtr grid = u0.grid();
  const double power = nonlinear_power(grid->dimension());

  EvolutionResult out;
  auto& traj = out.trajectory;
  auto& report = out.blowup;
  traj.nonlinearity = cfg.nonlinearity;

  SplitStep stepper(grid, cfg.nonlinearity);
  auto a = stepper.load(u0);
  StepRecord rec = stepper.measure(cfg.t0, a, stepper.to_spectral(a));
  double pot_prev = rec.spacetime;
  rec.spacetime = 0.0;
  traj.records.push_back(rec);
  traj.snapshots.push_back({cfg.t0, u0});

  const double eps = 1e-12 * std::max(1.0, std::abs(cfg.t1));
  std::size_t next_index = 1;
  auto next_snapshot = [&] {
    if (cfg.snapshot_interval <= 0.0) return cfg.t1;
    return std::min(cfg.t1, cfg.t0 + static_cast<double>(next_index) * cfg.snapshot_interval);
  };

  double t = cfg.t0;
  double spacetime = 0.0;
  while (t < cfg.t1 - eps) {
    const double linf = rec.linf;
    double dt = cfg.dt0;
    if (cfg.nonlinearity != 0.0 && linf > 0.0)
      dt = std::min(dt, cfg.c_nl / (std::abs(cfg.nonlinearity) * std::pow(linf, power)));
    if (dt < cfg.dt_min) {
      report.detected = true;
      report.trigger = "step";
      break;
    }
    const double target = next_snapshot();
    bool at_snapshot = false;
    if (t + dt >= target - eps) {
      dt = target - t;
      at_snapshot = true;
    }

    stepper.step(a, dt);
    if (!(stepper.tail() < kResolvedTail)) {
      report.trigger = "unresolved";
      break;
    }
    t = at_snapshot ? target : t + dt;
    rec = stepper.measure(t, a, stepper.spectral());
    spacetime += 0.5 * dt * (pot_prev + rec.spacetime);
    pot_prev = rec.spacetime;
    rec.spacetime = spacetime;
    traj.records.push_back(rec);

    if (at_snapshot) {
      traj.snapshots.push_back({t, from_unitary(grid, a)});
      ++next_index;
    }
    if (rec.kinetic > cfg.kinetic_max) {
      report.detected = true;
      report.trigger = "kinetic";
      break;
    }
  }
  report.t_stop = t;
  if (traj.snapshots.back().t != t) traj.snapshots.push_back({t, from_unitary(grid, a)});
  if (report.detected) {
    const auto fit = fit_blowup_rate(traj.records);
    report.t_est = fit.t_est;
    report.rate = fit.rate;
    report.prefactor = fit.prefactor;
    report.fit_residual = fit.fit_residual;
  }
  return out;
}

namespace {

struct LineFit {
  double slope, intercept, rms;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / n;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - slope * x[i] - intercept;
    ss += e * e;
  }
  return {slope, intercept, std::sqrt(ss / n)};
}

}  // namespace

BlowupReport fit_blowup_rate(const std::vector<StepRecord>& records, double window) {
  BlowupReport rep;
  if (records.size() < 5) return rep;
  const double k_end = records.back().kinetic;
  std::size_t first = records.size() - 1;
  while (first > 0 && records[first - 1].kinetic >= window * k_end) --first;
  if (records.size() - first < 5) return rep;

  std::vector<double> t, y;
  for (std::size_t i = first; i < records.size(); ++i) {
    // Drop repeated times from snapshot-aligned steps.
    if (!t.empty() && records[i].t <= t.back()) continue;
    t.push_back(records[i].t);
    y.push_back(std::log(records[i].kinetic));
  }
  if (t.size() < 5) return rep;
  const double t_last = t.back();
  const double width = t_last - t.front();
  std::vector<double> x(t.size());
  auto residual = [&](double T) {
    for (std::size_t i = 0; i < t.size(); ++i) x[i] = std::log(T - t[i]);
    return fit_line(x, y).rms;
  };
  const auto best = boost::math::tools::brent_find_minima(
      residual, t_last + 1e-6 * width, t_last + 2.0 * width, 40);
  const double T = best.first;
  for (std::size_t i = 0; i < t.size(); ++i) x[i] = std::log(T - t[i]);
  const auto line = fit_line(x, y);
  rep.detected = true;
  rep.t_est = T;
  rep.rate = -line.slope;
  rep.prefactor = std::exp(line.intercept);
  rep.fit_residual = line.rms;
  return rep;
}

double duhamel_residual(const Trajectory& traj, double t0, double t1) {
  if (!(t1 > t0)) throw InvalidArgument("duhamel_residual: requires t0 < t1");
  const double tol = 1e-9 * std::max(1.0, std::abs(t1));
  std::vector<const Snapshot*> snaps;
  for (const auto& s : traj.snapshots)
    if (s.t >= t0 - tol && s.t <= t1 + tol) snaps.push_back(&s);
  if (snaps.size() < 2 || std::abs(snaps.front()->t - t0) > tol || std::abs(snaps.back()->t - t1) > tol)
    throw PreconditionFailed("duhamel_residual: t0 and t1 must be snapshot times");
  const std::size_t intervals = snaps.size() - 1;
  if (static_cast<double>(intervals) < 8.0 * (t1 - t0) - 1e-9)
    throw PreconditionFailed("duhamel_residual: fewer than 8 snapshots per unit time");

  const auto& grid = *snaps.front()->u.grid();
  const auto xi = grid.frequencies();
  const std::size_t n = grid.size();

  // Quadrature weights in time.
  std::vector<double> w(snaps.size(), 0.0);
  const double h = (t1 - t0) / static_cast<double>(intervals);
  bool uniform = true;
  for (std::size_t j = 0; j < snaps.size(); ++j)
    if (std::abs(snaps[j]->t - (t0 + static_cast<double>(j) * h)) > 1e-9 * std::max(1.0, h)) uniform = false;
  if (uniform && intervals % 2 == 0) {
    for (std::size_t j = 0; j < snaps.size(); ++j)
      w[j] = h / 3.0 * ((j == 0 || j == intervals) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0));
  } else {
    for (std::size_t j = 0; j < intervals; ++j) {
      const double dt = snaps[j + 1]->t - snaps[j]->t;
      w[j] += 0.5 * dt;
      w[j + 1] += 0.5 * dt;
    }
  }

  auto spectral = [&](const RadialField& f) { return unitary_coordinates(to_frequency(f)); };
  auto evolve_phase = [&](std::vector<cplx>& b, double t) {
    for (std::size_t m = 0; m < n; ++m) b[m] *= std::polar(1.0, -xi[m] * xi[m] * t);
  };

  auto diff = spectral(snaps.back()->u);
  auto lin = spectral(snaps.front()->u);
  evolve_phase(lin, t1 - t0);
  for (std::size_t m = 0; m < n; ++m) diff[m] -= lin[m];

  if (traj.nonlinearity != 0.0) {
    const double power = nonlinear_power(grid.dimension());
    for (std::size_t j = 0; j < snaps.size(); ++j) {
      RadialField f = snaps[j]->u;
      for (auto& v : f.values()) v *= traj.nonlinearity * std::pow(std::abs(v), power);
      auto b = spectral(f);
      evolve_phase(b, t1 - snaps[j]->t);
      const cplx c = cplx(0.0, 1.0) * w[j];
      for (std::size_t m = 0; m < n; ++m) diff[m] -= c * b[m];
    }
  }
  double num = 0.0;
  for (const auto& v : diff) num += std::norm(v);
  return std::sqrt(num / mass(snaps.back()->u));
}

std::vector<std::pair<double, double>> scattering_norm(const Trajectory& traj) {
  std::vector<std::pair<double, double>> s;
  s.reserve(traj.records.size());
  for (const auto& r : traj.records) s.emplace_back(r.t, r.spacetime);
  return s;
}

void write_run_csv(const std::filesystem::path& path, const Trajectory& traj) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write run CSV: " + path.string());
  out << "t,mass,energy,kinetic,linf,S\n" << std::setprecision(17);
  for (const auto& r : traj.records)
    out << r.t << ',' << r.mass << ',' << r.energy << ',' << r.kinetic << ',' << r.linf << ','
        << r.spacetime << '\n';
}

}  // namespace nlslab
