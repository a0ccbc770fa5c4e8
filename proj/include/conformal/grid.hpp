#pragma once

#include <cstddef>
#include <vector>

#include "conformal/complex_point.hpp"

namespace conformal {

/// Log-radial polar grid on the annulus r_min <= |z| <= r_max:
/// r_i = r_min (r_max/r_min)^{i/(nr-1)}, theta_j = 2 pi j / ntheta.
class AnnularGrid {
 public:
  static AnnularGrid build(double r_min, double r_max, int nr, int ntheta);

  double r_min() const noexcept { return r_min_; }
  double r_max() const noexcept { return r_max_; }
  int nr() const noexcept { return nr_; }
  int ntheta() const noexcept { return ntheta_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(nr_) * ntheta_; }

  /// Uniform spacing in s = log r.
  double log_step() const noexcept { return log_step_; }
  double angle_step() const noexcept;
  double radius(int i) const;
  double angle(int j) const;
  ComplexPoint point(int i, int j) const;
  std::size_t index(int i, int j) const noexcept {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(ntheta_) + static_cast<std::size_t>(j);
  }

 private:
  AnnularGrid(double r_min, double r_max, int nr, int ntheta);
  double r_min_;
  double r_max_;
  int nr_;
  int ntheta_;
  double log_step_;
};

/// Nodal values on an AnnularGrid, stored radius-major.
struct GridField {
  AnnularGrid grid;
  std::vector<double> values;

  static GridField sample(const AnnularGrid& grid, const ScalarField& f);

  double at(int i, int j) const { return values[grid.index(i, j)]; }
  double& at(int i, int j) { return values[grid.index(i, j)]; }

  /// Bilinear interpolation in (log r, theta), periodic in theta. DomainError
  /// outside the annulus.
  double interpolate(ComplexPoint z) const;
  ScalarField as_field() const;

  /// Mean over the nodes of ring i (trapezoidal rule in theta).
  double ring_mean(int i) const;
  double ring_max(int i) const;
};

}  // namespace conformal
