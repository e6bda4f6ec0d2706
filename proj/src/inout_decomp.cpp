#include "nlslab/inout_decomp.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <random>
#include <tuple>

#include "nlslab/error.hpp"
#include "nlslab/simd/kernels.hpp"
#include "nlslab/spectral_ops.hpp"

namespace nlslab {

PVQuadrature::PVQuadrature(double length, std::size_t intervals) : length_(length) {
  if (!(length > 0.0)) throw InvalidArgument("PV quadrature length must be positive");
  if (intervals < 2) throw InvalidArgument("PV quadrature needs at least two intervals");
  if (intervals % 2) ++intervals;
  h_ = length / static_cast<double>(intervals);
  nodes_.resize(intervals + 1);
  weights_.resize(intervals + 1);
  for (std::size_t j = 0; j <= intervals; ++j) {
    nodes_[j] = h_ * static_cast<double>(j);
    weights_[j] = (j == 0 || j == intervals) ? 1.0 : (j % 2 ? 4.0 : 2.0);
    weights_[j] *= h_ / 3.0;
  }
}

cplx PVQuadrature::integrate(std::span<const cplx> g, double r, cplx g_r, cplx dg_r) const {
  if (g.size() != nodes_.size()) throw InvalidArgument("PV samples do not match the rule");
  if (!(r > 0.0 && r < length_)) throw InvalidArgument("PV pole must lie inside (0, L)");
  const double near = 1e-4 * h_;
  cplx s = 0.0;
  for (std::size_t j = 0; j < nodes_.size(); ++j) {
    const double rho = nodes_[j];
    const double gap = r - rho;
    const cplx phi = std::abs(gap) < near ? -dg_r / (r + rho) : (g[j] - g_r) / (gap * (r + rho));
    s += weights_[j] * phi;
  }
  return s + g_r * std::log((length_ + r) / (length_ - r)) / (2.0 * r);
}

double pv_selftest(const PVQuadrature& q) {
  const double l = q.length();
  std::vector<cplx> g(q.nodes().size());
  for (std::size_t j = 0; j < g.size(); ++j) g[j] = 1.0 / (1.0 + q.nodes()[j] * q.nodes()[j]);
  double err = 0.0;
  for (int i = 1; i <= 32; ++i) {
    // Irrational offsets keep the poles off the nodes.
    const double r = l * (i - 1.0 / std::numbers::sqrt2) / 32.5;
    const double gr = 1.0 / (1.0 + r * r);
    const double dgr = -2.0 * r * gr * gr;
    const double exact = gr * (std::atan(l) + std::log((l + r) / (l - r)) / (2.0 * r));
    err = std::max(err, std::abs(q.integrate(g, r, gr, dgr) - exact));
  }
  return err;
}

namespace {

struct InOutKernel {
  PVQuadrature rule;
  std::vector<double> modes;  // row-major (nodes x M): value of mode m at rho_j
};

std::shared_ptr<const InOutKernel> kernel_for(const GridPtr& grid) {
  static std::mutex mu;
  static std::map<std::tuple<int, std::size_t, double>, std::shared_ptr<const InOutKernel>> cache;
  const auto key = std::make_tuple(grid->dimension(), grid->size(), grid->rmax());
  std::lock_guard lock(mu);
  if (auto it = cache.find(key); it != cache.end()) return it->second;

  auto k = std::make_shared<InOutKernel>(InOutKernel{PVQuadrature(grid->rmax(), 4 * grid->size()), {}});
  if (pv_selftest(k->rule) > kPVSelftestTolerance)
    throw CertificationFailed("PV self-test failed on the auxiliary grid");
  const auto rho = k->rule.nodes();
  const std::size_t m = grid->size();
  k->modes.resize(rho.size() * m);
  for (std::size_t j = 0; j < rho.size(); ++j)
    for (std::size_t i = 0; i < m; ++i) k->modes[j * m + i] = grid->mode(i, rho[j]);
  cache.emplace(key, k);
  return k;
}

RadialField apply_kernel(const RadialField& f, Direction dir) {
  const auto& grid = *f.grid();
  const auto kernel = kernel_for(f.grid());
  const auto& rule = kernel->rule;
  const std::size_t m = grid.size();
  const int d = grid.dimension();
  const auto& simd = simd::kernels();

  const auto b = unitary_coordinates(to_frequency(f));
  std::vector<cplx> g(rule.nodes().size());
  simd.real_matvec(kernel->modes.data(), g.size(), m, b.data(), g.data());
  for (std::size_t j = 0; j < g.size(); ++j) g[j] *= std::pow(rule.nodes()[j], d - 1);

  // d/dr f at the nodes without the resolvability gate.
  std::vector<cplx> da(m);
  simd.real_matvec(grid.derivative_matrix().data(), m, m, b.data(), da.data());
  const auto df = from_unitary(f.grid(), da);

  const auto r = grid.nodes();
  const double sign = dir == Direction::outgoing ? 1.0 : -1.0;
  const cplx coef(0.0, sign / std::numbers::pi);
  std::vector<cplx> out(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double rk = r[k];
    const cplx gr = f[k] * std::pow(rk, d - 1);
    const cplx dgr = df[k] * std::pow(rk, d - 1) + (d - 1.0) * f[k] * std::pow(rk, d - 2);
    const cplx pv = rule.integrate(g, rk, gr, dgr);
    out[k] = 0.5 * f[k] + coef * std::pow(rk, 2 - d) * pv;
  }
  return RadialField(f.grid(), std::move(out));
}

void require_inout_domain(const RadialField& f, const char* what) {
  require_resolved(to_frequency(f), what);
  if (outer_tail_ratio(f) > kInOutTailBound)
    throw PreconditionFailed(std::string(what) +
                             ": field does not decay below 1e-8 of its peak by Rmax/2");
}

}  // namespace

const PVQuadrature& pv_quadrature(const GridPtr& grid) { return kernel_for(grid)->rule; }

double outer_tail_ratio(const RadialField& f) {
  const auto r = f.grid()->nodes();
  const double half = 0.5 * f.grid()->rmax();
  double peak = 0.0, tail = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) {
    const double a = std::abs(f[k]);
    peak = std::max(peak, a);
    if (r[k] >= half) tail = std::max(tail, a);
  }
  return peak > 0.0 ? tail / peak : 0.0;
}

RadialField p_inout(const RadialField& f, Direction dir) {
  require_inout_domain(f, "in/out decomposition");
  return apply_kernel(f, dir);
}

RadialField p_out(const RadialField& f) { return p_inout(f, Direction::outgoing); }
RadialField p_in(const RadialField& f) { return p_inout(f, Direction::incoming); }

RadialField p_band(const RadialField& f, double n, Direction dir) {
  if (!(n > 0.0)) throw InvalidArgument("p_band: N must be positive");
  require_inout_domain(f, "p_band");
  return apply_kernel(lp_project(f, Band::annulus, n), dir);
}

RadialField p_inout_unchecked(const RadialField& f, Direction dir) { return apply_kernel(f, dir); }

double exterior_bound_constant(std::span<const RadialField> bank, double n, Direction dir) {
  if (!(n > 0.0)) throw InvalidArgument("exterior bound: N must be positive");
  double c = 0.0;
  for (const auto& f : bank) {
    require_inout_domain(f, "exterior bound");
    const auto pf = apply_kernel(lp_project(f, Band::gt, n), dir);
    const auto r = f.grid()->nodes();
    const auto w = f.grid()->radial_measure();
    double s = 0.0;
    for (std::size_t k = 0; k < pf.size(); ++k)
      if (r[k] >= 1.0 / n) s += w[k] * std::norm(pf[k]);
    c = std::max(c, std::sqrt(s / mass(f)));
  }
  return c;
}

std::vector<RadialField> inout_bank(const GridPtr& grid, const RadialField* q, std::uint64_t seed) {
  constexpr std::size_t size = 50;
  std::vector<RadialField> bank;
  for (int i = 0; i < 10; ++i) {
    const double w = 0.15 * std::pow(1.4, i);
    bank.push_back(sample(grid, [w](double r) { return cplx(std::exp(-r * r / (w * w))); }));
    const double chirp = 0.5 / (w * w);
    bank.push_back(sample(grid, [w, chirp](double r) {
      return std::exp(-r * r / (w * w)) * std::polar(1.0, chirp * r * r);
    }));
  }
  if (q) bank.push_back(*q);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> freq(0.0, 4.0);
  const double reach = 0.25 * grid->rmax() * 24.0 / 25.0;
  while (bank.size() < size) {
    std::vector<std::pair<double, cplx>> terms(16);
    for (auto& [k, c] : terms) {
      k = freq(rng);
      c = cplx(normal(rng), normal(rng));
    }
    auto f = sample(grid, [&terms](double r) {
      cplx s = 0.0;
      for (const auto& [k, c] : terms) s += c * std::cos(k * r);
      return s;
    });
    bank.push_back(spatial_cutoff(f, reach, Side::le));
  }
  return bank;
}

double idempotency_defect(const RadialField& f) {
  const auto p1 = p_inout(f, Direction::outgoing);
  const auto p2 = p_inout_unchecked(p1, Direction::outgoing);
  return l2_distance(p2, p1) / std::sqrt(mass(p1));
}

}  // namespace nlslab
