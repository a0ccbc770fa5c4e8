#pragma once

#include <complex>
#include <functional>

namespace conformal {

/// A finite point of the complex plane. Construction rejects NaN/inf.
class ComplexPoint {
 public:
  constexpr ComplexPoint() = default;
  ComplexPoint(double re, double im);
  explicit ComplexPoint(std::complex<double> z) : ComplexPoint(z.real(), z.imag()) {}

  static ComplexPoint polar(double radius, double angle);

  double re() const noexcept { return re_; }
  double im() const noexcept { return im_; }
  double abs() const noexcept;
  double arg() const noexcept;
  std::complex<double> value() const noexcept { return {re_, im_}; }

  friend ComplexPoint operator+(ComplexPoint a, ComplexPoint b) { return {a.re_ + b.re_, a.im_ + b.im_}; }
  friend ComplexPoint operator-(ComplexPoint a, ComplexPoint b) { return {a.re_ - b.re_, a.im_ - b.im_}; }
  friend bool operator==(ComplexPoint a, ComplexPoint b) = default;

 private:
  double re_ = 0.0;
  double im_ = 0.0;
};

/// Real-valued map on (part of) the plane.
using ScalarField = std::function<double(ComplexPoint)>;

}  // namespace conformal
