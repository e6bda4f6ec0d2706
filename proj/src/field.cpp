#include "nlslab/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nlslab/error.hpp"
#include "nlslab/simd/kernels.hpp"

namespace nlslab {

namespace detail {

template <class Tag>
GridSamples<Tag>::GridSamples(GridPtr grid, std::vector<cplx> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) throw InvalidArgument("field requires a grid");
  if (values_.size() != grid_->size())
    throw InvalidArgument("sample count does not match grid node count");
  for (const auto& v : values_)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw InvalidArgument("field contains non-finite samples");
}

template <class Tag>
GridSamples<Tag>& GridSamples<Tag>::operator+=(const GridSamples& other) {
  require_same_grid(*grid_, *other.grid_);
  simd::kernels().axpy(1.0, other.values_.data(), values_.data(), values_.size());
  return *this;
}

template <class Tag>
GridSamples<Tag>& GridSamples<Tag>::operator-=(const GridSamples& other) {
  require_same_grid(*grid_, *other.grid_);
  simd::kernels().axpy(-1.0, other.values_.data(), values_.data(), values_.size());
  return *this;
}

template <class Tag>
GridSamples<Tag>& GridSamples<Tag>::operator*=(cplx s) {
  for (auto& v : values_) v *= s;
  return *this;
}

template class GridSamples<PhysicalTag>;
template class GridSamples<SpectralTag>;

}  // namespace detail

void require_same_grid(const RadialGrid& a, const RadialGrid& b) {
  if (!a.same_as(b)) throw GridMismatch();
}

RadialField sample(GridPtr grid, const std::function<cplx(double)>& f) {
  std::vector<cplx> v(grid->size());
  const auto r = grid->nodes();
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = f(r[k]);
  return RadialField(std::move(grid), std::move(v));
}

SpectralField sample_spectrum(GridPtr grid, const std::function<cplx(double)>& g) {
  std::vector<cplx> v(grid->size());
  const auto xi = grid->frequencies();
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = g(xi[k]);
  return SpectralField(std::move(grid), std::move(v));
}

std::vector<cplx> unitary_coordinates(const RadialField& f) {
  std::vector<cplx> a(f.values().begin(), f.values().end());
  simd::kernels().real_mul(a.data(), f.grid()->physical_scale().data(), a.size());
  return a;
}

std::vector<cplx> unitary_coordinates(const SpectralField& g) {
  std::vector<cplx> b(g.values().begin(), g.values().end());
  simd::kernels().real_mul(b.data(), g.grid()->spectral_scale().data(), b.size());
  return b;
}

RadialField from_unitary(GridPtr grid, std::span<const cplx> a) {
  std::vector<cplx> v(a.begin(), a.end());
  const auto s = grid->physical_scale();
  for (std::size_t k = 0; k < v.size(); ++k) v[k] /= s[k];
  return RadialField(std::move(grid), std::move(v));
}

SpectralField spectral_from_unitary(GridPtr grid, std::span<const cplx> b) {
  std::vector<cplx> v(b.begin(), b.end());
  const auto s = grid->spectral_scale();
  for (std::size_t k = 0; k < v.size(); ++k) v[k] /= s[k];
  return SpectralField(std::move(grid), std::move(v));
}

namespace {

std::vector<cplx> hankel(const RadialGrid& grid, std::span<const cplx> in) {
  std::vector<cplx> out(in.size());
  simd::kernels().real_matvec(grid.transform_matrix().data(), grid.size(), grid.size(),
                              in.data(), out.data());
  return out;
}

}  // namespace

SpectralField to_frequency(const RadialField& f) {
  const auto b = hankel(*f.grid(), unitary_coordinates(f));
  return spectral_from_unitary(f.grid(), b);
}

RadialField to_physical(const SpectralField& g) {
  const auto a = hankel(*g.grid(), unitary_coordinates(g));
  return from_unitary(g.grid(), a);
}

double tail_fraction(const SpectralField& g) {
  const auto b = unitary_coordinates(g);
  const std::size_t n = b.size();
  const std::size_t start = n - std::max<std::size_t>(1, n / 10);
  const auto& k = simd::kernels();
  const double total = k.weighted_norm2(b.data(), nullptr, n);
  if (total == 0.0) return 0.0;
  return k.weighted_norm2(b.data() + start, nullptr, n - start) / total;
}

bool is_resolved(const RadialField& f) { return tail_fraction(to_frequency(f)) < kResolvedTail; }

void require_resolved(const SpectralField& g, const char* what) {
  const double tail = tail_fraction(g);
  if (!(tail < kResolvedTail))
    throw Unresolved(std::string(what) + ": field is not resolved (high-frequency tail " +
                     std::to_string(tail) + " of the mass)");
}

double mass(const RadialField& f) {
  return simd::kernels().weighted_norm2(f.values().data(), f.grid()->radial_measure().data(),
                                        f.size());
}

double lp_integral(const RadialField& f, double p) {
  if (!(p >= 1.0)) throw InvalidArgument("L^p exponent must be >= 1");
  const auto w = f.grid()->radial_measure();
  double s = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) s += w[k] * std::pow(std::abs(f[k]), p);
  return s;
}

double lp_norm(const RadialField& f, double p) {
  if (std::isinf(p) && p > 0) {
    double m = 0.0;
    for (const auto& v : f.values()) m = std::max(m, std::abs(v));
    return m;
  }
  if (p == 2.0) return std::sqrt(mass(f));
  return std::pow(lp_integral(f, p), 1.0 / p);
}

double kinetic(const SpectralField& g) {
  const auto& grid = *g.grid();
  const auto xi = grid.frequencies();
  const auto mu = grid.spectral_measure();
  std::vector<double> w(g.size());
  for (std::size_t m = 0; m < w.size(); ++m) w[m] = mu[m] * xi[m] * xi[m];
  return std::sqrt(simd::kernels().weighted_norm2(g.values().data(), w.data(), g.size()));
}

double kinetic(const RadialField& f) {
  const auto g = to_frequency(f);
  require_resolved(g, "kinetic");
  return kinetic(g);
}

double energy(const RadialField& f) {
  const int d = f.grid()->dimension();
  const double k = kinetic(f);
  const double p = critical_exponent(d);
  return 0.5 * k * k - d / (2.0 * (d + 2)) * lp_integral(f, p);
}

double norm(const RadialField& f, NormKind kind, double p) {
  switch (kind) {
    case NormKind::mass:
      return mass(f);
    case NormKind::lp:
      return lp_norm(f, p);
    case NormKind::kinetic:
      return kinetic(f);
    case NormKind::energy:
      return energy(f);
  }
  throw InvalidArgument("unknown norm kind");
}

RadialField apply_multiplier(const RadialField& f, std::span<const double> m) {
  if (m.size() != f.size()) throw InvalidArgument("multiplier size does not match grid");
  auto b = hankel(*f.grid(), unitary_coordinates(f));
  simd::kernels().real_mul(b.data(), m.data(), b.size());
  return from_unitary(f.grid(), hankel(*f.grid(), b));
}

RadialField apply_multiplier(const RadialField& f, const std::function<double(double)>& m) {
  const auto xi = f.grid()->frequencies();
  std::vector<double> mv(xi.size());
  for (std::size_t i = 0; i < mv.size(); ++i) mv[i] = m(xi[i]);
  return apply_multiplier(f, mv);
}

RadialField laplacian(const RadialField& f) {
  auto b = hankel(*f.grid(), unitary_coordinates(f));
  require_resolved(spectral_from_unitary(f.grid(), b), "laplacian");
  const auto xi = f.grid()->frequencies();
  for (std::size_t m = 0; m < b.size(); ++m) b[m] *= -xi[m] * xi[m];
  return from_unitary(f.grid(), hankel(*f.grid(), b));
}

RadialField radial_derivative(const RadialField& f) {
  const auto& grid = *f.grid();
  const auto b = hankel(grid, unitary_coordinates(f));
  require_resolved(spectral_from_unitary(f.grid(), b), "radial derivative");
  std::vector<cplx> a(b.size());
  simd::kernels().real_matvec(grid.derivative_matrix().data(), grid.size(), grid.size(),
                              b.data(), a.data());
  return from_unitary(f.grid(), a);
}

std::vector<cplx> evaluate(const RadialField& f, std::span<const double> radii) {
  const auto& grid = *f.grid();
  const auto b = hankel(grid, unitary_coordinates(f));
  std::vector<cplx> out(radii.size());
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (radii[i] >= grid.rmax()) continue;
    cplx s = 0.0;
    for (std::size_t m = 0; m < b.size(); ++m) s += grid.mode(m, radii[i]) * b[m];
    out[i] = s;
  }
  return out;
}

std::vector<cplx> evaluate_spectrum(const RadialField& f, std::span<const double> freqs) {
  const auto& grid = *f.grid();
  const auto a = unitary_coordinates(f);
  std::vector<cplx> out(freqs.size());
  for (std::size_t i = 0; i < freqs.size(); ++i) {
    cplx s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += grid.spectral_mode(k, freqs[i]) * a[k];
    out[i] = s;
  }
  return out;
}

RadialField dilate(const RadialField& f, double lambda) {
  if (!(lambda > 0.0)) throw InvalidArgument("dilation factor must be positive");
  if (lambda == 1.0) return f;
  const auto& grid = *f.grid();
  // Samples of fhat beyond the band are zero, not the aliased extension.
  const double band = grid.band_limit();
  std::vector<double> freqs;
  for (double xi : grid.frequencies())
    if (xi / lambda <= band) freqs.push_back(xi / lambda);
  auto spec = evaluate_spectrum(f, freqs);
  spec.resize(grid.size());
  const double amp = std::pow(lambda, -0.5 * grid.dimension());
  for (auto& v : spec) v *= amp;
  return to_physical(SpectralField(f.grid(), std::move(spec)));
}

cplx inner(const RadialField& f, const RadialField& g) {
  require_same_grid(*f.grid(), *g.grid());
  const auto w = f.grid()->radial_measure();
  cplx s = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) s += w[k] * std::conj(f[k]) * g[k];
  return s;
}

double l2_distance(const RadialField& f, const RadialField& g) { return std::sqrt(mass(f - g)); }

}  // namespace nlslab
