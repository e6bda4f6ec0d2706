#include "nlslab/ground_state.hpp"

#include <array>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <fstream>
#include <iomanip>
#include "json.hpp"
#include <sstream>

#include "nlslab/error.hpp"

namespace nlslab {

namespace odeint = boost::numeric::odeint;

RadialField focusing_term(const RadialField& f) {
  const double s = nonlinear_power(f.grid()->dimension());
  RadialField out = f;
  for (auto& v : out.values()) v *= std::pow(std::abs(v), s);
  return out;
}

double gn_rhs(const RadialField& f, const GroundStateSolution& q) {
  const int d = f.grid()->dimension();
  const double k = kinetic(f);
  return (d + 2.0) / d * std::pow(std::sqrt(mass(f)) / q.l2(), 4.0 / d) * k * k;
}

double gn_deficit(const RadialField& f, const GroundStateSolution& q) {
  require_same_grid(*f.grid(), *q.grid());
  if (mass(f) == 0.0) throw InvalidArgument("gn_deficit: zero field");
  return gn_rhs(f, q) - lp_integral(f, critical_exponent(f.grid()->dimension()));
}

double weinstein_quotient(const RadialField& f) {
  const int d = f.grid()->dimension();
  const double k = kinetic(f);
  return std::pow(mass(f), 2.0 / d) * k * k / lp_integral(f, critical_exponent(d));
}

GroundStateSolution certify_ground_state(RadialField profile, std::string method,
                                         GroundStateTolerance tol) {
  const int d = profile.grid()->dimension();
  GroundStateSolution q{std::move(profile), std::move(method)};
  const auto& f = q.profile;

  const double peak = std::abs(f[0]);
  const double floor = 1e-10 * peak;
  for (std::size_t k = 0; k < f.size(); ++k) {
    if (std::abs(f[k].imag()) > 1e-12 * peak)
      throw CertificationFailed(q.method + ": ground state must be real");
    if (f[k].real() <= floor) break;
    if (k > 0 && f[k].real() >= f[k - 1].real())
      throw CertificationFailed(q.method + ": profile is not strictly decreasing at r = " +
                                std::to_string(f.grid()->nodes()[k]));
  }
  if (f[0].real() <= 0.0) throw CertificationFailed(q.method + ": profile is not positive");

  const auto lap = laplacian(f);
  q.peak = evaluate(f, std::array{0.0})[0].real();
  q.mass = mass(f);
  const double k = kinetic(f);
  q.kinetic_sq = k * k;
  q.potential = lp_integral(f, critical_exponent(d));
  q.energy = 0.5 * q.kinetic_sq - d / (2.0 * (d + 2)) * q.potential;
  q.residual = std::sqrt(mass(lap + focusing_term(f) - f));
  q.gn_constant = (d + 2.0) / d * std::pow(q.mass, -2.0 / d);

  if (!(q.residual <= tol.relative_residual * q.l2())) {
    std::ostringstream msg;
    msg << q.method << ": elliptic residual " << q.residual / q.l2() << " exceeds "
        << tol.relative_residual;
    throw CertificationFailed(msg.str());
  }
  if (!(std::abs(q.energy) <= tol.relative_energy * q.kinetic_sq)) {
    std::ostringstream msg;
    msg << q.method << ": |E(Q)|/||grad Q||^2 = " << std::abs(q.energy) / q.kinetic_sq
        << " exceeds " << tol.relative_energy;
    throw CertificationFailed(msg.str());
  }
  return q;
}

GridPtr default_ground_state_grid(int d) { return RadialGrid::make(d, 512, 30.0); }

// ---------------------------------------------------------------------------
// Shooting

namespace {

using State = std::array<double, 2>;

struct ProfileOde {
  double d;
  double power;
  void operator()(const State& x, State& dx, double r) const {
    dx[0] = x[1];
    dx[1] = x[0] - std::pow(std::abs(x[0]), power) * x[0] - (d - 1.0) / r * x[1];
  }
};

enum class Shot { overshoot, undershoot, undecided };

constexpr double kStartRadius = 1e-4;
constexpr double kOdeTol = 1e-13;

// Series start removing the (d-1)/r singularity.
State series_start(double q0, const ProfileOde& ode) {
  const double c = (q0 - std::pow(q0, 1.0 + ode.power)) / ode.d;
  return {q0 + 0.5 * c * kStartRadius * kStartRadius, c * kStartRadius};
}

Shot classify(double q0, const ProfileOde& ode, double r_end) {
  auto stepper = odeint::make_dense_output(kOdeTol, kOdeTol, odeint::runge_kutta_dopri5<State>());
  stepper.initialize(series_start(q0, ode), kStartRadius, 1e-3);
  while (stepper.current_time() < r_end) {
    stepper.do_step(ode);
    const State& s = stepper.current_state();
    if (s[0] < 0.0 && s[1] < 0.0) return Shot::overshoot;
    if (s[1] > 0.0 && s[0] > 0.0) return Shot::undershoot;
  }
  return Shot::undecided;
}

// Decaying solution of the linearized equation, r^{-nu} K_nu(r).
double decaying_tail(double nu, double r) {
  return std::pow(r, -nu) * boost::math::cyl_bessel_k(nu, r);
}

}  // namespace

GroundStateSolution solve_shooting(GridPtr grid, double tol) {
  if (!(tol > 0.0 && tol <= 1e-6)) throw InvalidArgument("shooting tolerance must be in (0, 1e-6]");
  const int d = grid->dimension();
  const ProfileOde ode{static_cast<double>(d), nonlinear_power(d)};
  const double r_end = std::max(60.0, grid->rmax());

  // Bracket on a coarse ladder in [1, 20].
  double lo = 0.0, hi = 0.0;
  Shot prev = Shot::undecided;
  double prev_q0 = 0.0;
  for (double q0 = 1.05; q0 <= 20.0 + 1e-12; q0 += 0.05) {
    const Shot s = classify(q0, ode, r_end);
    if (prev == Shot::undershoot && s == Shot::overshoot) {
      lo = prev_q0;
      hi = q0;
      break;
    }
    prev = s;
    prev_q0 = q0;
  }
  if (hi == 0.0) throw NotConverged("shooting: no overshoot/undershoot bracket for Q(0) in [1, 20]");

  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (classify(mid, ode, r_end) == Shot::overshoot ? hi : lo) = mid;
  }
  const double q0 = 0.5 * (lo + hi);

  // Sample the trajectory at the grid nodes until it has decayed to the
  // matching level, then continue with the linear decaying solution.
  const auto nodes = grid->nodes();
  const double match_level = 1e-6 * q0;
  std::vector<cplx> values(grid->size());
  State x = series_start(q0, ode);
  double r = kStartRadius;
  std::size_t k = 0;
  double match_r = 0.0, match_q = 0.0;
  auto stepper = odeint::make_controlled(kOdeTol, kOdeTol, odeint::runge_kutta_dopri5<State>());
  for (; k < nodes.size(); ++k) {
    odeint::integrate_adaptive(stepper, ode, x, r, nodes[k], 1e-3);
    r = nodes[k];
    if (x[0] <= match_level || x[1] >= 0.0) break;
    values[k] = x[0];
    match_r = r;
    match_q = x[0];
  }
  if (match_r == 0.0) throw CertificationFailed("shooting: trajectory did not decay");
  const double nu = grid->order();
  const double tail_scale = match_q / decaying_tail(nu, match_r);
  for (; k < nodes.size(); ++k) values[k] = tail_scale * decaying_tail(nu, nodes[k]);

  auto q = certify_ground_state(RadialField(grid, std::move(values)), "shooting");
  q.peak = q0;
  return q;
}

GroundStateSolution solve_shooting(int d, double tol) {
  return solve_shooting(default_ground_state_grid(d), tol);
}

// ---------------------------------------------------------------------------
// Normalized gradient flow

GroundStateSolution solve_gradient_flow(GridPtr grid, GradientFlowOptions opts,
                                        GradientFlowHistory* history) {
  if (!(opts.dtau > 0.0)) throw InvalidArgument("gradient flow step must be positive");
  if (!(opts.seed_amplitude > 0.0) || !(opts.seed_width > 0.0))
    throw InvalidArgument("gradient flow seed must be a positive Gaussian");
  const int d = grid->dimension();
  const double p = critical_exponent(d);
  const auto xi = grid->frequencies();

  const double a = 1.0 / (opts.seed_width * opts.seed_width);
  RadialField u = sample(grid, [&](double r) { return cplx(opts.seed_amplitude * std::exp(-a * r * r)); });

  // Zero-energy normalization: scale the amplitude so that
  // ||grad u||^2 = d/(d+2) ||u||_p^p, which Q satisfies.
  auto normalize = [&](RadialField& f) {
    const double k = kinetic(f);
    const double kappa = (d + 2.0) * k * k / (d * lp_integral(f, p));
    f *= std::pow(kappa, 0.25 * d);
  };
  normalize(u);

  double mu = 0.0, residual = INFINITY;
  int rescales = 0;
  std::vector<double> inverse(xi.size());
  int step = 0;
  for (; step < opts.max_steps; ++step) {
    const RadialField nl = focusing_term(u);
    const RadialField lap = laplacian(u);
    const double m = mass(u);
    mu = inner(u, lap + nl).real() / m;
    if (!(mu > 0.0)) throw NotConverged("gradient flow: non-positive eigenvalue estimate");

    // Keep the iterate near the mu = 1 scale; the quotient is dilation invariant.
    if (std::abs(std::log(mu)) > std::log(1.25) && rescales < 20) {
      u = dilate(u, 1.0 / std::sqrt(mu));
      for (auto& v : u.values()) v = v.real();
      normalize(u);
      ++rescales;
      --step;
      continue;
    }
    residual = std::sqrt(mass(lap + nl - mu * u) / m);
    if (history) {
      history->mu.push_back(mu);
      history->residual.push_back(residual);
      history->weinstein.push_back(weinstein_quotient(u));
    }
    if (residual < opts.tol) break;

    for (std::size_t i = 0; i < xi.size(); ++i)
      inverse[i] = 1.0 / (1.0 + opts.dtau * (mu + xi[i] * xi[i]));
    RadialField rhs = u + opts.dtau * nl;
    u = apply_multiplier(rhs, inverse);
    for (auto& v : u.values()) v = v.real();
    normalize(u);
  }
  if (residual >= opts.tol)
    throw NotConverged("gradient flow: residual " + std::to_string(residual) + " after " +
                       std::to_string(step) + " steps");

  // P = mu^{d/4} Q(sqrt(mu) x), so Q = dilate(P, mu^{-1/2}).
  RadialField q = dilate(u, 1.0 / std::sqrt(mu));
  for (auto& v : q.values()) v = v.real();
  return certify_ground_state(std::move(q), "gradient-flow");
}

void write_certificate(const std::filesystem::path& json_path, const GroundStateSolution& q,
                       const std::filesystem::path& snapshot_path) {
  nlohmann::ordered_json j;
  j["d"] = q.dimension();
  j["method"] = q.method;
  j["grid"] = {{"M", q.grid()->size()}, {"Rmax", q.grid()->rmax()}};
  j["mass"] = q.mass;
  j["kinetic_sq"] = q.kinetic_sq;
  j["potential"] = q.potential;
  j["energy"] = q.energy;
  j["residual"] = q.residual;
  j["gn_constant"] = q.gn_constant;
  j["peak"] = q.peak;
  j["snapshot"] = snapshot_path.filename().string();
  std::ofstream out(json_path);
  if (!out) throw Error("cannot write certificate: " + json_path.string());
  out << j.dump(2) << '\n';
}

}  // namespace nlslab
