#include "nlslab/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>

#include "json.hpp"
#include "nlslab/error.hpp"
#include "nlslab/special.hpp"

namespace nlslab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double energy_with(const RadialField& u, double nonlinearity) {
  const int d = u.grid()->dimension();
  const double k = kinetic(u);
  return 0.5 * k * k - nonlinearity * d / (2.0 * (d + 2)) * lp_integral(u, critical_exponent(d));
}

double outside_mass(const RadialField& u, double radius) {
  const auto r = u.grid()->nodes();
  const auto w = u.grid()->radial_measure();
  double s = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k)
    if (r[k] > radius) s += w[k] * std::norm(u[k]);
  return s;
}

bool uniform_spacing(const Trajectory& traj) {
  const auto& s = traj.snapshots;
  if (s.size() < 2) return false;
  const double h = s[1].t - s[0].t;
  for (std::size_t i = 2; i < s.size(); ++i)
    if (std::abs((s[i].t - s[i - 1].t) - h) > 1e-9 * std::abs(h)) return false;
  return h > 0.0;
}

// Smallest x among `nodes` such that the weight strictly beyond x is at most
// `budget`; 0 if the total already fits.
double smallest_radius(std::span<const double> nodes, std::span<const double> weight, double budget) {
  double tail = 0.0;
  for (double v : weight) tail += v;
  budget *= 1.0 + 1e-12;
  if (tail <= budget) return 0.0;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    tail -= weight[k];
    if (tail <= budget) return nodes[k];
  }
  return nodes.back();
}

struct Masses {
  std::vector<double> physical, spectral;
};

Masses mass_densities(const RadialField& u) {
  const auto& grid = *u.grid();
  const auto g = to_frequency(u);
  Masses m{std::vector<double>(u.size()), std::vector<double>(u.size())};
  for (std::size_t k = 0; k < u.size(); ++k) {
    m.physical[k] = grid.radial_measure()[k] * std::norm(u[k]);
    m.spectral[k] = grid.spectral_measure()[k] * std::norm(g[k]);
  }
  return m;
}

double ladder_ceiling(double xi) {
  const double k = std::ceil(kLadderStepsPerOctave * std::log2(xi) - 1e-9);
  return std::exp2(k / kLadderStepsPerOctave);
}

}  // namespace

double VirialCutoff::operator()(double r) const { return special::bump(r / radius, 1.0, 2.0); }

double VirialCutoff::derivative(double r) const {
  return special::bump_derivative(r / radius, 1.0, 2.0) / radius;
}

double virial(const RadialField& u, double radius) {
  if (!(radius > 0.0)) throw InvalidArgument("virial radius must be positive");
  const VirialCutoff psi{radius};
  const auto r = u.grid()->nodes();
  const auto w = u.grid()->radial_measure();
  double s = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) s += w[k] * r[k] * r[k] * psi(r[k]) * std::norm(u[k]);
  return s;
}

double virial_rate(const RadialField& u, double radius) {
  if (!(radius > 0.0)) throw InvalidArgument("virial radius must be positive");
  const VirialCutoff psi{radius};
  const auto du = radial_derivative(u);
  const auto r = u.grid()->nodes();
  const auto w = u.grid()->radial_measure();
  double s = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double grad_a = 2.0 * r[k] * psi(r[k]) + r[k] * r[k] * psi.derivative(r[k]);
    s += w[k] * grad_a * (std::conj(u[k]) * du[k]).imag();
  }
  return 2.0 * s;
}

VirialAccelReport virial_accel_check(const Trajectory& traj, double radius) {
  const auto& s = traj.snapshots;
  if (s.size() < 5) throw PreconditionFailed("virial check needs at least 5 snapshots");
  if (!uniform_spacing(traj)) throw PreconditionFailed("virial check needs equally spaced snapshots");
  for (const auto& snap : s)
    if (outside_mass(snap.u, radius) > 0.01 * mass(snap.u))
      throw PreconditionFailed("virial check: more than 1% of the mass lies outside R");

  const double h = s[1].t - s[0].t;
  std::vector<double> v(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) v[i] = virial(s[i].u, radius);

  VirialAccelReport rep;
  const double k0 = kinetic(s.front().u);
  rep.scale = 16.0 * std::max(std::abs(energy_with(s.front().u, traj.nonlinearity)), 0.5 * k0 * k0);
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    const double d2 = (v[i + 1] - 2.0 * v[i] + v[i - 1]) / (h * h);
    const double e16 = 16.0 * energy_with(s[i].u, traj.nonlinearity);
    rep.times.push_back(s[i].t);
    rep.second_difference.push_back(d2);
    rep.target.push_back(e16);
    rep.max_deviation = std::max(rep.max_deviation, std::abs(d2 - e16));
  }
  rep.relative_deviation = rep.max_deviation / rep.scale;
  return rep;
}

ExteriorNorms exterior_norms(const RadialField& u, double radius) {
  const auto du = radial_derivative(u);
  const auto r = u.grid()->nodes();
  const auto w = u.grid()->radial_measure();
  ExteriorNorms e;
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (r[k] <= radius) continue;
    e.mass += w[k] * std::norm(u[k]);
    e.kinetic += w[k] * std::norm(du[k]);
  }
  e.mass = std::sqrt(e.mass);
  e.kinetic = std::sqrt(e.kinetic);
  return e;
}

double frequency_scale(const RadialField& u) {
  const auto m = mass_densities(u);
  double total = 0.0;
  for (double v : m.spectral) total += v;
  if (!(total > 0.0)) throw InvalidArgument("frequency scale of the zero field");
  const auto xi = u.grid()->frequencies();
  double cum = 0.0;
  for (std::size_t k = 0; k < xi.size(); ++k) {
    cum += m.spectral[k];
    if (cum >= 0.5 * total) return ladder_ceiling(xi[k]);
  }
  return ladder_ceiling(xi.back());
}

CompactnessEntry compactness_modulus(const Trajectory& traj, double eta) {
  if (!(eta > 0.0 && eta <= 1.0)) throw InvalidArgument("compactness: eta must lie in (0, 1]");
  CompactnessEntry e{eta, 0.0, {}};
  for (const auto& snap : traj.snapshots) {
    const auto m = mass_densities(snap.u);
    double total = 0.0;
    for (double v : m.physical) total += v;
    const double n = frequency_scale(snap.u);
    const double rx = smallest_radius(snap.u.grid()->nodes(), m.physical, eta * total);
    const double rxi = smallest_radius(snap.u.grid()->frequencies(), m.spectral, eta * total);
    const double c = std::max(rx * n, rxi / n);
    e.per_snapshot.push_back(c);
    e.c = std::max(e.c, c);
  }
  return e;
}

namespace {

LocalConstancy local_constancy(std::span<const double> t, std::span<const double> n) {
  LocalConstancy lc{std::numeric_limits<double>::infinity(), false};
  for (std::size_t i = 0; i < t.size(); ++i)
    for (std::size_t j = 0; j < t.size(); ++j) {
      if (i == j) continue;
      const double gap = t[i] - t[j];
      lc.value = std::min(lc.value, n[i] * std::pow(1.0 + gap * gap, 0.25) / n[j]);
    }
  lc.flagged = lc.value < kLocalConstancyFlag;
  return lc;
}

}  // namespace

LocalConstancy local_constancy_probe(const Trajectory& traj) {
  if (traj.snapshots.size() < 3) throw PreconditionFailed("local constancy probe needs at least 3 snapshots");
  std::vector<double> t, n;
  for (const auto& s : traj.snapshots) {
    t.push_back(s.t);
    n.push_back(frequency_scale(s.u));
  }
  return local_constancy(t, n);
}

ProfileDistance profile_distance(const RadialField& u, const GroundStateSolution& q) {
  require_same_grid(*u.grid(), *q.grid());
  const double ku = kinetic(u);
  if (!(ku > 0.0)) throw InvalidArgument("profile distance: zero kinetic energy");
  ProfileDistance p;
  p.lambda = std::sqrt(q.kinetic_sq) / ku;
  const auto v = dilate(u, p.lambda);
  p.theta = -std::arg(inner(q.profile, v));
  const auto diff = v * std::polar(1.0, p.theta) - q.profile;
  const double k = kinetic(to_frequency(diff));
  p.delta = std::sqrt(mass(diff) + k * k);
  return p;
}

double frequency_blowup_exponent(std::span<const double> t, std::span<const double> n, double blowup_time) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!(t[i] < blowup_time) || !(n[i] > 0.0)) continue;
    const double x = -std::log(blowup_time - t[i]);
    const double y = std::log(n[i]);
    sx += x, sy += y, sxx += x * x, sxy += x * y;
    ++cnt;
  }
  if (cnt < 2) return kNaN;
  const double den = cnt * sxx - sx * sx;
  return den > 0.0 ? (cnt * sxy - sx * sy) / den : kNaN;
}

DiagnosticsReport diagnose(const Trajectory& traj, const GroundStateSolution* q, DiagnosticsOptions opts,
                           double blowup_time) {
  DiagnosticsReport rep;
  rep.options = opts;
  const auto& s = traj.snapshots;
  for (const auto& snap : s) {
    rep.t.push_back(snap.t);
    rep.virial.push_back(virial(snap.u, opts.virial_radius));
    rep.virial_rate.push_back(virial_rate(snap.u, opts.virial_radius));
    rep.energy16.push_back(16.0 * energy_with(snap.u, traj.nonlinearity));
    const auto ext = exterior_norms(snap.u, opts.exterior_radius);
    rep.m_out.push_back(ext.mass);
    rep.k_out.push_back(ext.kinetic);
    rep.frequency_scale.push_back(frequency_scale(snap.u));
    rep.profile_distance.push_back(q ? profile_distance(snap.u, *q).delta : kNaN);
  }
  rep.virial_accel.assign(s.size(), kNaN);
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    const double h1 = s[i].t - s[i - 1].t, h2 = s[i + 1].t - s[i].t;
    if (std::abs(h1 - h2) > 1e-9 * h1) continue;
    rep.virial_accel[i] = (rep.virial[i + 1] - 2.0 * rep.virial[i] + rep.virial[i - 1]) / (h1 * h1);
  }
  for (double eta : {0.1, 0.01, 0.001}) rep.compactness.push_back(compactness_modulus(traj, eta));
  if (s.size() >= 3) rep.local_constancy = local_constancy(rep.t, rep.frequency_scale);
  if (std::isfinite(blowup_time))
    rep.frequency_exponent = frequency_blowup_exponent(rep.t, rep.frequency_scale, blowup_time);
  return rep;
}

void write_diagnostics_csv(const std::filesystem::path& path, const DiagnosticsReport& r) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write diagnostics CSV: " + path.string());
  out << "t,virial,virial_rate,virial_accel,energy16,m_out,k_out,N,delta\n" << std::setprecision(17);
  for (std::size_t i = 0; i < r.t.size(); ++i)
    out << r.t[i] << ',' << r.virial[i] << ',' << r.virial_rate[i] << ',' << r.virial_accel[i] << ','
        << r.energy16[i] << ',' << r.m_out[i] << ',' << r.k_out[i] << ',' << r.frequency_scale[i]
        << ',' << r.profile_distance[i] << '\n';
}

void write_diagnostics_summary(const std::filesystem::path& path, const DiagnosticsReport& r) {
  const auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); };
  nlohmann::ordered_json j;
  j["virial_radius"] = r.options.virial_radius;
  j["exterior_radius"] = r.options.exterior_radius;
  j["frequency_scale_definition"] = "median: smallest 2^(k/8) holding half the L2 mass";
  j["snapshots"] = r.t.size();
  j["frequency_exponent"] = num(r.frequency_exponent);
  auto table = nlohmann::ordered_json::array();
  for (const auto& c : r.compactness) table.push_back({{"eta", c.eta}, {"C", c.c}});
  j["compactness"] = table;
  j["local_constancy"] = {{"min", num(r.local_constancy.value)}, {"flagged", r.local_constancy.flagged}};
  double nmin = kNaN, nmax = kNaN, dmax = kNaN;
  for (std::size_t i = 0; i < r.t.size(); ++i) {
    nmin = std::isnan(nmin) ? r.frequency_scale[i] : std::min(nmin, r.frequency_scale[i]);
    nmax = std::isnan(nmax) ? r.frequency_scale[i] : std::max(nmax, r.frequency_scale[i]);
    if (std::isfinite(r.profile_distance[i]))
      dmax = std::isnan(dmax) ? r.profile_distance[i] : std::max(dmax, r.profile_distance[i]);
  }
  j["frequency_scale"] = {{"min", num(nmin)}, {"max", num(nmax)}};
  j["profile_distance_max"] = num(dmax);
  std::ofstream out(path);
  if (!out) throw Error("cannot write diagnostics summary: " + path.string());
  out << std::setw(2) << j << '\n';
}

}  // namespace nlslab
