#include "nlslab/spectral_ops.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

#include "nlslab/error.hpp"
#include "nlslab/special.hpp"

namespace nlslab {

double BumpCutoff::operator()(double x) const { return special::bump(std::abs(x), inner, outer); }

std::vector<double> lp_multiplier(const RadialGrid& grid, Band band, double n) {
  if (!(n > 0.0)) throw InvalidArgument("Littlewood-Paley scale N must be positive");
  const BumpCutoff phi;
  const auto xi = grid.frequencies();
  std::vector<double> m(xi.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    const double x = xi[i];
    switch (band) {
      case Band::le:
        m[i] = phi.le(x, n);
        break;
      case Band::annulus:
        m[i] = phi.le(x, n) - phi.le(x, 0.5 * n);
        break;
      case Band::gt:
        m[i] = phi.gt(x, n);
        break;
      case Band::fattened:
        // P_{N/2} + P_N + P_{2N} telescopes.
        m[i] = phi.le(x, 2.0 * n) - phi.le(x, 0.25 * n);
        break;
    }
  }
  return m;
}

RadialField lp_project(const RadialField& f, Band band, double n) {
  return apply_multiplier(f, lp_multiplier(*f.grid(), band, n));
}

RadialField spatial_cutoff(const RadialField& f, double c, Side side) {
  if (!(c > 0.0)) throw InvalidArgument("spatial cutoff radius must be positive");
  const BumpCutoff phi;
  const auto r = f.grid()->nodes();
  RadialField out = f;
  for (std::size_t k = 0; k < out.size(); ++k) out[k] *= side == Side::le ? phi.le(r[k], c) : phi.gt(r[k], c);
  return out;
}

RadialField fractional_derivative(const RadialField& f, double s) {
  return apply_multiplier(f, [s](double xi) { return std::pow(xi, s); });
}

// ---------------------------------------------------------------------------
// Bernstein probe

namespace {

ProbeStats summarize(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  const double med = n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  return {v.front(), v.back(), med};
}

}  // namespace

BernsteinReport bernstein_probe(const GridPtr& grid, double n, double p, double q, double s,
                                int trials, std::uint64_t seed) {
  if (!(n > 0.0)) throw InvalidArgument("bernstein_probe: N must be positive");
  if (!(p >= 1.0 && q >= p)) throw InvalidArgument("bernstein_probe: requires 1 <= p <= q <= inf");
  if (trials < 20) throw InvalidArgument("bernstein_probe: at least 20 trials");
  if (1.1 * n > grid->band_limit()) throw Unresolved("bernstein_probe: annulus exceeds the grid band");

  const int d = grid->dimension();
  const auto annulus = lp_multiplier(*grid, Band::annulus, n);
  const auto xi = grid->frequencies();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> width(0.5, 4.0);
  std::uniform_int_distribution<int> terms(1, 4), power(0, 4);

  std::vector<double> dplus, dminus, leb;
  const double lp_scale = std::pow(n, d / p - (std::isinf(q) ? 0.0 : d / q));
  while (static_cast<int>(leb.size()) < trials) {
    const int j = terms(rng);
    std::vector<cplx> c(j);
    std::vector<double> a(j);
    std::vector<int> k(j);
    for (int i = 0; i < j; ++i) {
      c[i] = {normal(rng), normal(rng)};
      a[i] = width(rng);
      k[i] = power(rng);
    }
    std::vector<cplx> g(xi.size());
    for (std::size_t m = 0; m < g.size(); ++m) {
      const double x = xi[m] / n;
      cplx v = 0.0;
      for (int i = 0; i < j; ++i) v += c[i] * std::pow(x, k[i]) * std::exp(-a[i] * x * x);
      g[m] = annulus[m] * v;
    }
    const RadialField pn = to_physical(SpectralField(grid, g));
    const double base_p = lp_norm(pn, p);
    if (!(base_p > 1e-150)) continue;  // degenerate trial, resample

    dplus.push_back(lp_norm(fractional_derivative(pn, s), p) / (std::pow(n, s) * base_p));
    dminus.push_back(lp_norm(fractional_derivative(pn, -s), p) / (std::pow(n, -s) * base_p));
    leb.push_back(lp_norm(pn, q) / (lp_scale * base_p));
  }
  return {n, p, q, s, summarize(dplus), summarize(dminus), summarize(leb)};
}

// ---------------------------------------------------------------------------
// Mismatch probe

namespace {

using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vec = Eigen::VectorXd;

// Real linear operator on unitary coordinates, given as a chain of dense
// factors applied right to left.
struct Chain {
  std::vector<Mat> factors;
  Vec apply(const Vec& x) const {
    Vec y = x;
    for (auto it = factors.rbegin(); it != factors.rend(); ++it) y = *it * y;
    return y;
  }
  Vec apply_t(const Vec& y) const {
    Vec x = y;
    for (const auto& f : factors) x = f.transpose() * x;
    return x;
  }
};

Mat diag_times(const Eigen::VectorXd& d, const Eigen::Map<const Mat>& a) { return d.asDiagonal() * a; }

Eigen::VectorXd to_vec(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// Matrix I with (I b)_k = s_k * integral_{r_k}^{inf} phi_{<=R}'(rho) F(rho) d rho,
// where F = sum_m mode(m, .) b_m.
Mat tail_integral_matrix(const RadialGrid& grid, double r) {
  const std::size_t n = grid.size();
  const auto nodes = grid.nodes();
  const auto s = grid.physical_scale();
  const BumpCutoff phi;
  const double lo = r * BumpCutoff::inner, hi = r * BumpCutoff::outer;
  auto dphi = [&](double x) {
    const double h = 1e-6 * r;
    return (phi.le(x + h, r) - phi.le(x - h, r)) / (2.0 * h);
  };

  std::vector<double> cuts{lo};
  for (double x : nodes)
    if (x > lo && x < hi) cuts.push_back(x);
  cuts.push_back(hi);

  // Integral over each sub-interval, per mode.
  using GL = boost::math::quadrature::gauss<double, 20>;
  std::vector<std::vector<double>> piece(cuts.size() - 1, std::vector<double>(n));
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i], b = cuts[i + 1];
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    const auto& abscissa = GL::abscissa();
    const auto& weight = GL::weights();
    for (std::size_t g = 0; g < abscissa.size(); ++g) {
      for (int sign : {-1, 1}) {
        if (abscissa[g] == 0.0 && sign < 0) continue;
        const double x = mid + sign * half * abscissa[g];
        const double w = half * weight[g] * dphi(x);
        for (std::size_t m = 0; m < n; ++m) piece[i][m] += w * grid.mode(m, x);
      }
    }
  }

  Mat out = Mat::Zero(n, n);
  for (std::size_t k = 0; k < n && nodes[k] < hi; ++k) {
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      if (cuts[i + 1] <= nodes[k]) continue;  // sub-interval lies below r_k
      for (std::size_t m = 0; m < n; ++m) out(k, m) += piece[i][m];
    }
    out.row(k) *= s[k];
  }
  return out;
}

}  // namespace

RadialField gradient_potential(const RadialField& f, double r) {
  if (!(r > 0.0)) throw InvalidArgument("gradient_potential: R must be positive");
  const auto& g = *f.grid();
  const std::size_t n = g.size();
  const auto b = unitary_coordinates(to_frequency(f));
  const Mat tail = tail_integral_matrix(g, r);
  auto out = spatial_cutoff(f, r, Side::le);
  const auto s = g.physical_scale();
  for (std::size_t k = 0; k < n; ++k) {
    cplx acc = 0.0;
    for (std::size_t m = 0; m < n; ++m) acc += tail(k, m) * b[m];
    out[k] += acc / s[k];
  }
  return out;
}

MismatchResult mismatch_probe(const GridPtr& grid, const MismatchParams& p) {
  if (!(p.r > 0.0) || !(p.n > 0.0)) throw InvalidArgument("mismatch_probe: R and N must be positive");
  if (p.trials < 1 || p.power_iterations < 1) throw InvalidArgument("mismatch_probe: needs trials");
  const auto& g = *grid;
  const std::size_t n = g.size();
  const Eigen::Map<const Mat> u(g.transform_matrix().data(), n, n);
  const Eigen::Map<const Mat> dr(g.derivative_matrix().data(), n, n);
  const BumpCutoff phi;
  const auto nodes = g.nodes();

  auto physical = [&](auto fn) {
    Vec v(n);
    for (std::size_t k = 0; k < n; ++k) v[k] = fn(nodes[k]);
    return v;
  };

  Chain chain;
  MismatchResult res;
  if (p.kind == MismatchKind::real) {
    if (1.1 * p.n > g.band_limit()) throw Unresolved("mismatch_probe: N exceeds the grid band");
    if (p.r * BumpCutoff::outer >= g.rmax()) throw Unresolved("mismatch_probe: R exceeds the grid");
    const Vec inner = physical([&](double x) { return phi.le(x, 0.5 * p.r); });
    const Vec outer = physical([&](double x) { return phi.gt(x, p.r); });
    const Vec low = to_vec(lp_multiplier(g, Band::le, p.n));
    // phi_{>R} [d/dr] P_{<=N} phi_{<=R/2}
    chain.factors.push_back(p.gradient ? diag_times(outer, dr) : diag_times(outer, u));
    chain.factors.push_back(diag_times(low, u));
    chain.factors.push_back(inner.asDiagonal());
    res.shape = std::pow(p.n, (p.gradient ? 1.0 : 0.0) - p.m) * std::pow(p.r, -p.m);
  } else {
    const double big = std::max(p.n, p.m_freq), small = std::min(p.n, p.m_freq);
    if (!(small > 0.0)) throw InvalidArgument("mismatch_probe: M must be positive");
    if (big < 4.0 * small)
      throw PreconditionFailed("mismatch_probe: frequency kind requires max{N,M} >= 4 min{N,M}");
    if (1.1 * big > g.band_limit()) throw Unresolved("mismatch_probe: annuli exceed the grid band");
    if (p.r * BumpCutoff::outer >= g.rmax()) throw Unresolved("mismatch_probe: R exceeds the grid");
    const Vec pn = to_vec(lp_multiplier(g, Band::annulus, p.n));
    const Vec pm = to_vec(lp_multiplier(g, Band::annulus, p.m_freq));
    const Vec cut = physical([&](double x) { return phi.le(x, p.r); });
    if (!p.gradient) {
      // P_N phi_{<=R} P_M
      chain.factors.push_back(diag_times(pn, u));
      chain.factors.push_back(diag_times(cut, u));
      chain.factors.push_back(diag_times(pm, u));
      res.shape = std::pow(big, -p.m) * std::pow(p.r, -p.m);
    } else {
      // phi_{<=R} grad F = grad H with H = phi F + int_r^inf phi' F, so
      // ||P_N phi grad F|| = || xi phi_N Hhat ||.
      Vec xi_pn(n);
      const auto xi = g.frequencies();
      for (std::size_t m = 0; m < n; ++m) xi_pn[m] = xi[m] * pn[m];
      Mat h = cut.asDiagonal() * u;
      h += tail_integral_matrix(g, p.r);
      chain.factors.push_back(diag_times(xi_pn, u));
      chain.factors.push_back(std::move(h));
      chain.factors.push_back(diag_times(pm, u));
      res.shape = p.m_freq * std::pow(big, -p.m) * std::pow(p.r, -p.m);
    }
  }

  // Randomized lower bound, refined by power iteration on A^T A.
  std::mt19937_64 rng(p.seed);
  std::normal_distribution<double> normal;
  Vec best;
  double best_ratio = -1.0;
  for (int t = 0; t < p.trials; ++t) {
    Vec x(n);
    for (std::size_t k = 0; k < n; ++k) x[k] = normal(rng);
    const double ratio = chain.apply(x).norm() / x.norm();
    if (ratio > best_ratio) {
      best_ratio = ratio;
      best = x;
    }
  }
  Vec x = best / best.norm();
  double sigma = best_ratio;
  for (int it = 0; it < p.power_iterations; ++it) {
    Vec y = chain.apply_t(chain.apply(x));
    const double ny = y.norm();
    if (ny == 0.0) break;
    x = y / ny;
    sigma = std::max(sigma, chain.apply(x).norm());
  }
  res.measured = sigma;
  return res;
}

std::vector<ProbeRecord> mismatch_survey(const GridPtr& grid, const std::vector<MismatchParams>& points,
                                         std::size_t reference) {
  if (reference >= points.size()) throw InvalidArgument("mismatch_survey: reference out of range");
  std::vector<MismatchResult> res;
  res.reserve(points.size());
  for (const auto& p : points) res.push_back(mismatch_probe(grid, p));
  const double c = res[reference].measured / res[reference].shape;

  std::vector<ProbeRecord> out;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    std::ostringstream params;
    params << "R=" << p.r << ";N=" << p.n;
    if (p.kind == MismatchKind::freq) params << ";M=" << p.m_freq;
    if (p.gradient) params << ";grad";
    std::string kind = p.kind == MismatchKind::real ? "real" : "freq";
    const double bound = c * res[i].shape;
    out.push_back({kind, params.str(), p.m, res[i].measured, bound, res[i].measured / bound});
  }
  return out;
}

void write_probe_csv(const std::filesystem::path& path, const std::vector<ProbeRecord>& records) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write probe CSV: " + path.string());
  out << "kind,params,m,measured,bound,ratio\n" << std::setprecision(10);
  for (const auto& r : records)
    out << r.kind << ',' << r.params << ',' << r.m << ',' << r.measured << ',' << r.bound << ','
        << r.ratio << '\n';
}

}  // namespace nlslab
