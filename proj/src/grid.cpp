#include "conformal/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "conformal/errors.hpp"

namespace conformal {

AnnularGrid::AnnularGrid(double r_min, double r_max, int nr, int ntheta)
    : r_min_(r_min),
      r_max_(r_max),
      nr_(nr),
      ntheta_(ntheta),
      log_step_(std::log(r_max / r_min) / (nr - 1)) {}

AnnularGrid AnnularGrid::build(double r_min, double r_max, int nr, int ntheta) {
  if (!std::isfinite(r_min) || !std::isfinite(r_max) || !(r_min > 0.0) || !(r_min < r_max)) {
    std::ostringstream os;
    os << "AnnularGrid: need 0 < r_min < r_max, got (" << r_min << ", " << r_max << ")";
    throw ParameterError(os.str());
  }
  if (nr < 8 || ntheta < 8) {
    throw ParameterError("AnnularGrid: nr and ntheta must be >= 8, got " + std::to_string(nr) + "x" +
                         std::to_string(ntheta));
  }
  return AnnularGrid(r_min, r_max, nr, ntheta);
}

double AnnularGrid::angle_step() const noexcept { return 2.0 * M_PI / ntheta_; }

double AnnularGrid::radius(int i) const {
  if (i == nr_ - 1) return r_max_;
  return r_min_ * std::exp(i * log_step_);
}

double AnnularGrid::angle(int j) const { return angle_step() * j; }

ComplexPoint AnnularGrid::point(int i, int j) const { return ComplexPoint::polar(radius(i), angle(j)); }

GridField GridField::sample(const AnnularGrid& grid, const ScalarField& f) {
  GridField out{grid, std::vector<double>(grid.size())};
  for (int i = 0; i < grid.nr(); ++i) {
    for (int j = 0; j < grid.ntheta(); ++j) out.at(i, j) = f(grid.point(i, j));
  }
  return out;
}

double GridField::interpolate(ComplexPoint z) const {
  const double r = z.abs();
  if (!(r >= grid.r_min()) || !(r <= grid.r_max())) {
    std::ostringstream os;
    os << "GridField: |z| = " << r << " outside [" << grid.r_min() << ", " << grid.r_max() << "]";
    throw DomainError(os.str());
  }
  const double s = std::log(r / grid.r_min()) / grid.log_step();
  const int i0 = std::clamp(static_cast<int>(std::floor(s)), 0, grid.nr() - 2);
  const double ts = std::clamp(s - i0, 0.0, 1.0);
  double theta = z.arg();
  if (theta < 0.0) theta += 2.0 * M_PI;
  const double a = theta / grid.angle_step();
  const int j0 = static_cast<int>(std::floor(a)) % grid.ntheta();
  const int j1 = (j0 + 1) % grid.ntheta();
  const double ta = a - std::floor(a);
  const double lo = (1.0 - ta) * at(i0, j0) + ta * at(i0, j1);
  const double hi = (1.0 - ta) * at(i0 + 1, j0) + ta * at(i0 + 1, j1);
  return (1.0 - ts) * lo + ts * hi;
}

ScalarField GridField::as_field() const {
  return [self = *this](ComplexPoint z) { return self.interpolate(z); };
}

double GridField::ring_mean(int i) const {
  double sum = 0.0;
  for (int j = 0; j < grid.ntheta(); ++j) sum += at(i, j);
  return sum / grid.ntheta();
}

double GridField::ring_max(int i) const {
  double m = at(i, 0);
  for (int j = 1; j < grid.ntheta(); ++j) m = std::max(m, at(i, j));
  return m;
}

}  // namespace conformal
