#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "nlslab/grid.hpp"

namespace nlslab {

using cplx = std::complex<double>;

namespace detail {

// Shared storage for samples tied to a grid; values must all be finite.
template <class Tag>
class GridSamples {
 public:
  GridSamples(GridPtr grid, std::vector<cplx> values);

  static GridSamples zero(GridPtr grid) {
    const auto n = grid->size();
    return GridSamples(std::move(grid), std::vector<cplx>(n));
  }

  const GridPtr& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const cplx> values() const noexcept { return values_; }
  std::span<cplx> values() noexcept { return values_; }
  const cplx& operator[](std::size_t i) const { return values_[i]; }
  cplx& operator[](std::size_t i) { return values_[i]; }

  GridSamples& operator+=(const GridSamples& other);
  GridSamples& operator-=(const GridSamples& other);
  GridSamples& operator*=(cplx s);

  friend GridSamples operator+(GridSamples a, const GridSamples& b) { return a += b; }
  friend GridSamples operator-(GridSamples a, const GridSamples& b) { return a -= b; }
  friend GridSamples operator*(GridSamples a, cplx s) { return a *= s; }
  friend GridSamples operator*(cplx s, GridSamples a) { return a *= s; }

 private:
  GridPtr grid_;
  std::vector<cplx> values_;
};

struct PhysicalTag {};
struct SpectralTag {};

}  // namespace detail

/// Samples u(r_k) of a radial function u(x) = f(|x|).
using RadialField = detail::GridSamples<detail::PhysicalTag>;
/// Samples fhat(xi_m) of the Fourier transform of a radial function.
using SpectralField = detail::GridSamples<detail::SpectralTag>;

RadialField sample(GridPtr grid, const std::function<cplx(double)>& f);
SpectralField sample_spectrum(GridPtr grid, const std::function<cplx(double)>& g);

void require_same_grid(const RadialGrid& a, const RadialGrid& b);

SpectralField to_frequency(const RadialField& f);
RadialField to_physical(const SpectralField& g);

/// Unitary coordinates a_k = s_k f(r_k); sum |a_k|^2 is the mass.
std::vector<cplx> unitary_coordinates(const RadialField& f);
RadialField from_unitary(GridPtr grid, std::span<const cplx> a);
std::vector<cplx> unitary_coordinates(const SpectralField& g);
SpectralField spectral_from_unitary(GridPtr grid, std::span<const cplx> b);

/// Fraction of L^2 mass carried by the top 10% of frequency nodes.
double tail_fraction(const SpectralField& g);
inline constexpr double kResolvedTail = 1e-6;
bool is_resolved(const RadialField& f);
/// Throws Unresolved naming `what` if the tail test fails.
void require_resolved(const SpectralField& g, const char* what);

enum class NormKind { mass, lp, kinetic, energy };

double mass(const RadialField& f);
/// L^p norm for p >= 1; p = infinity gives the sup over nodes.
double lp_norm(const RadialField& f, double p);
/// int |f|^p dx (no root), the form that appears in the energy.
double lp_integral(const RadialField& f, double p);
/// ||grad f||_2, computed on the frequency side.
double kinetic(const RadialField& f);
double kinetic(const SpectralField& g);
/// E(f) = 1/2 ||grad f||^2 - d/(2(d+2)) ||f||_{2(d+2)/d}^{2(d+2)/d}
double energy(const RadialField& f);
/// Dispatcher matching the NormKind enumeration; `p` is used for NormKind::lp.
double norm(const RadialField& f, NormKind kind, double p = 2.0);

/// Mass-critical exponent 2(d+2)/d.
inline double critical_exponent(int d) { return 2.0 * (d + 2) / d; }
/// Nonlinearity power 4/d.
inline double nonlinear_power(int d) { return 4.0 / d; }

RadialField laplacian(const RadialField& f);
/// d/dr f at the nodes (spectral).
RadialField radial_derivative(const RadialField& f);
/// Multiply on the frequency side by m(xi) (no resolvability check).
RadialField apply_multiplier(const RadialField& f, const std::function<double(double)>& m);
RadialField apply_multiplier(const RadialField& f, std::span<const double> m);

/// Band-limited interpolant of f evaluated at arbitrary radii.
std::vector<cplx> evaluate(const RadialField& f, std::span<const double> radii);
/// Fourier transform of the band-limited interpolant at arbitrary frequencies.
std::vector<cplx> evaluate_spectrum(const RadialField& f, std::span<const double> freqs);

/// lambda^{d/2} f(lambda x), resampled on the frequency side:
/// fhat_lambda(xi) = lambda^{-d/2} fhat(xi / lambda). Mass-preserving and
/// exact for band-limited data that stays inside the grid.
RadialField dilate(const RadialField& f, double lambda);

/// <f, g> = int conj(f) g dx.
cplx inner(const RadialField& f, const RadialField& g);
double l2_distance(const RadialField& f, const RadialField& g);

}  // namespace nlslab
