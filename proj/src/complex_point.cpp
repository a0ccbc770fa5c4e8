#include "conformal/complex_point.hpp"

#include <cmath>

#include "conformal/errors.hpp"

namespace conformal {

ComplexPoint::ComplexPoint(double re, double im) : re_(re), im_(im) {
  if (!std::isfinite(re) || !std::isfinite(im)) {
    throw DomainError("ComplexPoint: non-finite component");
  }
}

ComplexPoint ComplexPoint::polar(double radius, double angle) {
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

double ComplexPoint::abs() const noexcept { return std::hypot(re_, im_); }

double ComplexPoint::arg() const noexcept { return std::atan2(im_, re_); }

}  // namespace conformal
