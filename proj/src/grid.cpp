#include "nlslab/grid.hpp"

#include <Eigen/Dense>
#include <boost/math/special_functions/bessel.hpp>
#include <cmath>
#include <iterator>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <tuple>

#include "nlslab/error.hpp"
#include "nlslab/special.hpp"

namespace nlslab {

namespace {

// Newton-Schulz iteration towards the orthogonal polar factor. The raw
// Hankel matrix is orthogonal to ~1e-8 for small M and ~1e-12 for M ~ 1000,
// so one or two sweeps reach roundoff.
double orthogonalize(std::vector<double>& flat, std::size_t n) {
  Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> u(
      flat.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(u.rows(), u.cols());
  Eigen::MatrixXd work = u;
  double defect = ((work * work) - eye).cwiseAbs().maxCoeff();
  for (int sweep = 0; sweep < 6 && defect > 1e-15; ++sweep) {
    Eigen::MatrixXd sq = work * work;
    Eigen::MatrixXd next = 0.5 * work * (3.0 * eye - sq);
    next = 0.5 * (next + next.transpose()).eval();
    const double next_defect = ((next * next) - eye).cwiseAbs().maxCoeff();
    if (next_defect >= defect) break;
    work = std::move(next);
    defect = next_defect;
  }
  u = work;
  return defect;
}

}  // namespace

RadialGrid::RadialGrid(int dimension, std::size_t nodes, double rmax)
    : dimension_(dimension), order_(0.5 * dimension - 1.0), rmax_(rmax) {
  if (dimension < 1) throw InvalidArgument("grid dimension must be >= 1");
  if (nodes < 16) throw InvalidArgument("grid needs at least 16 nodes");
  if (!(rmax > 0.0) || !std::isfinite(rmax)) throw InvalidArgument("grid radius must be positive");

  const std::size_t n = nodes;
  const double nu = order_;
  std::vector<double> zeros;
  zeros.reserve(n + 1);
  boost::math::cyl_bessel_j_zero(nu, 1, static_cast<unsigned>(n + 1), std::back_inserter(zeros));
  const double s = zeros[n];
  band_limit_ = s / rmax;
  sphere_area_ = 2.0 * std::pow(std::numbers::pi, 0.5 * dimension) / std::tgamma(0.5 * dimension);

  nodes_.resize(n);
  frequencies_.resize(n);
  weights_.resize(n);
  dual_weights_.resize(n);
  measure_.resize(n);
  spectral_measure_.resize(n);
  physical_scale_.resize(n);
  spectral_scale_.resize(n);
  std::vector<double> jnext(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double jk = zeros[k];
    jnext[k] = std::abs(boost::math::cyl_bessel_j(nu + 1.0, jk));
    nodes_[k] = jk * rmax / s;
    frequencies_[k] = jk / rmax;
    weights_[k] = 2.0 * rmax * rmax / (s * s * jnext[k] * jnext[k]);
    dual_weights_[k] = 2.0 / (rmax * rmax * jnext[k] * jnext[k]);
    measure_[k] = sphere_area_ * weights_[k] * std::pow(nodes_[k], 2.0 * nu);
    spectral_measure_[k] = sphere_area_ * dual_weights_[k] * std::pow(frequencies_[k], 2.0 * nu);
    physical_scale_[k] = std::sqrt(measure_[k]);
    spectral_scale_[k] = std::sqrt(spectral_measure_[k]);
  }

  transform_.resize(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double t = 2.0 / (s * jnext[i] * jnext[j]) *
                       boost::math::cyl_bessel_j(nu, zeros[i] * zeros[j] / s);
      transform_[i * n + j] = t;
      transform_[j * n + i] = t;
    }
  }
  orthogonality_defect_ = orthogonalize(transform_, n);

  derivative_.resize(n * n);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t m = 0; m < n; ++m) {
      derivative_[k * n + m] = -std::sqrt(weights_[k] * dual_weights_[m]) * frequencies_[m] *
                               boost::math::cyl_bessel_j(nu + 1.0, frequencies_[m] * nodes_[k]);
    }
  }
}

GridPtr RadialGrid::make(int dimension, std::size_t nodes, double rmax) {
  static std::mutex mutex;
  static std::map<std::tuple<int, std::size_t, double>, GridPtr> cache;
  const auto key = std::make_tuple(dimension, nodes, rmax);
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  auto grid = std::make_shared<const RadialGrid>(dimension, nodes, rmax);
  std::lock_guard lock(mutex);
  return cache.emplace(key, std::move(grid)).first->second;
}

double RadialGrid::mode(std::size_t m, double r) const {
  if (r >= rmax_) return 0.0;
  return std::sqrt(dual_weights_[m] / sphere_area_) *
         special::scaled_bessel_j(order_, frequencies_[m], r);
}

double RadialGrid::mode_derivative(std::size_t m, double r) const {
  if (r >= rmax_ || r <= 0.0) return 0.0;
  const double xi = frequencies_[m];
  return -std::sqrt(dual_weights_[m] / sphere_area_) * xi * std::pow(r, -order_) *
         boost::math::cyl_bessel_j(order_ + 1.0, xi * r);
}

double RadialGrid::spectral_mode(std::size_t k, double xi) const {
  return std::sqrt(weights_[k] / sphere_area_) *
         special::scaled_bessel_j(order_, nodes_[k], xi);
}

}  // namespace nlslab
