#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace nlslab {

class RadialGrid;
using GridPtr = std::shared_ptr<const RadialGrid>;

/// Discretization of spherically symmetric functions on R^d.
///
/// Physical nodes are r_k = j_k R / S and frequency nodes xi_k = j_k / R,
/// where j_1 < ... < j_M are the positive zeros of J_nu (nu = d/2 - 1) and
/// S = j_{M+1}. A radial function f is stored through its unitary
/// coordinates a_k = s_k f(r_k), s_k = sqrt(omega w_k) r_k^nu, so that
/// sum |a_k|^2 is the mass. The frequency side uses b_m = sigma_m fhat(xi_m)
/// with the same normalization, and b = U a where U is the symmetric
/// orthogonal discrete Hankel matrix of order nu. The Fourier transform is
/// the unitary one, fhat(xi) = (2 pi)^{-d/2} int e^{-i x.xi} f(x) dx.
///
/// Grids are immutable and shared; make() returns a cached instance for
/// repeated parameters.
class RadialGrid {
 public:
  static GridPtr make(int dimension, std::size_t nodes, double rmax);

  int dimension() const noexcept { return dimension_; }
  double order() const noexcept { return order_; }
  std::size_t size() const noexcept { return nodes_.size(); }
  double rmax() const noexcept { return rmax_; }
  /// Largest representable frequency S / R.
  double band_limit() const noexcept { return band_limit_; }
  /// Surface area of the unit sphere S^{d-1}.
  double sphere_area() const noexcept { return sphere_area_; }

  std::span<const double> nodes() const noexcept { return nodes_; }
  std::span<const double> frequencies() const noexcept { return frequencies_; }
  /// Quadrature weights for int_0^R F(r) r dr.
  std::span<const double> weights() const noexcept { return weights_; }
  /// Quadrature weights for int_0^{S/R} G(xi) xi dxi.
  std::span<const double> dual_weights() const noexcept { return dual_weights_; }
  /// Weights for int_{R^d} h(|x|) dx = sum_k measure_k h(r_k).
  std::span<const double> radial_measure() const noexcept { return measure_; }
  std::span<const double> spectral_measure() const noexcept { return spectral_measure_; }
  std::span<const double> physical_scale() const noexcept { return physical_scale_; }
  std::span<const double> spectral_scale() const noexcept { return spectral_scale_; }

  /// Symmetric orthogonal M x M matrix (row-major) mapping a to b and back.
  std::span<const double> transform_matrix() const noexcept { return transform_; }
  /// Row-major M x M matrix mapping spectral coordinates b to the unitary
  /// coordinates of the radial derivative d/dr f.
  std::span<const double> derivative_matrix() const noexcept { return derivative_; }

  /// Value at radius r contributed by a unit spectral coordinate b_m.
  /// Zero for r >= R.
  double mode(std::size_t m, double r) const;
  /// Radial derivative of mode(m, r).
  double mode_derivative(std::size_t m, double r) const;
  /// Fourier transform at frequency xi contributed by a unit physical coordinate a_k.
  double spectral_mode(std::size_t k, double xi) const;

  /// Largest |U^2 - I| entry after orthogonalization.
  double orthogonality_defect() const noexcept { return orthogonality_defect_; }

  bool same_as(const RadialGrid& other) const noexcept {
    return this == &other || (dimension_ == other.dimension_ && size() == other.size() &&
                              rmax_ == other.rmax_);
  }

  RadialGrid(int dimension, std::size_t nodes, double rmax);

 private:
  int dimension_;
  double order_;
  double rmax_;
  double band_limit_;
  double sphere_area_;
  double orthogonality_defect_ = 0.0;
  std::vector<double> nodes_, frequencies_, weights_, dual_weights_;
  std::vector<double> measure_, spectral_measure_, physical_scale_, spectral_scale_;
  std::vector<double> transform_, derivative_;
};

}  // namespace nlslab
