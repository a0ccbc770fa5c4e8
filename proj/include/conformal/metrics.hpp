#pragma once

#include <optional>
#include <string>

#include "conformal/complex_point.hpp"

namespace conformal {

/// Planar domain of a density: the disk |z - center| < outer_radius with the
/// closed disk |z - center| <= inner_radius removed. When `punctured` is set
/// the center itself is always excluded, even for inner_radius == 0.
struct PuncturedDisk {
  ComplexPoint center{};
  double inner_radius = 0.0;
  double outer_radius = 1.0;
  bool punctured = true;

  bool contains(ComplexPoint z) const noexcept;
  /// True when the closed disk of radius `rho` about z lies inside the domain.
  bool contains_disk(ComplexPoint z, double rho) const noexcept;
  /// Natural length scale at z: distance to the puncture, or 1 when unpunctured.
  double local_scale(ComplexPoint z) const noexcept;
};

/// Evaluator of a conformal density lambda(z) > 0 on a punctured disk,
/// carrying optional singularity metadata.
class MetricField {
 public:
  MetricField(std::string name, ScalarField density, PuncturedDisk domain,
              std::optional<double> order_hint = std::nullopt,
              std::optional<double> curvature_hint = std::nullopt);

  /// Density at z. Throws DomainError outside the domain or when the
  /// underlying evaluator returns a non-positive or non-finite value.
  double operator()(ComplexPoint z) const;
  double log_density(ComplexPoint z) const;

  const std::string& name() const noexcept { return name_; }
  const PuncturedDisk& domain() const noexcept { return domain_; }
  std::optional<double> order_hint() const noexcept { return order_hint_; }
  std::optional<double> curvature_hint() const noexcept { return curvature_hint_; }

  /// c * lambda. Curvature scales by 1/c^2, the order is unchanged.
  MetricField scaled(double c) const;
  /// Same density on a smaller domain.
  MetricField restricted(PuncturedDisk domain) const;

  ScalarField density_field() const;
  ScalarField log_field() const;

 private:
  std::string name_;
  ScalarField density_;
  PuncturedDisk domain_;
  std::optional<double> order_hint_;
  std::optional<double> curvature_hint_;
};

/// Parameters of the maximal metric lambda_{alpha,R} on the punctured disk D*_R.
class LambdaAlphaRParams {
 public:
  LambdaAlphaRParams(double alpha, double R);
  double alpha() const noexcept { return alpha_; }
  double R() const noexcept { return R_; }

 private:
  double alpha_;
  double R_;
};

/// 1/(1-|z|^2) on the unit disk.
double hyperbolic_disk_density(ComplexPoint z);
/// 1/(2|z| log(1/|z|)) on the punctured unit disk.
double punctured_disk_density(ComplexPoint z);

/// lambda_{alpha,R}(z). Rational form for alpha < 1 (sinh form very close to
/// the puncture), 1/(2|z| log(R/|z|)) for alpha == 1.
double lambda_alpha_R(const LambdaAlphaRParams& params, ComplexPoint z);
/// (1-alpha) / (2|z| sinh((1-alpha) log(R/|z|))), alpha < 1 only.
double lambda_alpha_R_sinh(const LambdaAlphaRParams& params, ComplexPoint z);

MetricField hyperbolic_disk_metric();
MetricField punctured_disk_metric();
MetricField lambda_alpha_R_metric(const LambdaAlphaRParams& params);
MetricField constant_metric(double c, PuncturedDisk domain);

/// Density of the pullback f*lambda at a point w, given f(w) and |f'(w)|.
double pullback_density(const MetricField& metric, ComplexPoint f_value, double f_deriv_abs);

/// -Delta log lambda / lambda^2 with a centered 5-point Laplacian of step h
/// (order 2). Order 4 combines the 5-point Laplacians of steps h and 2h by
/// Richardson extrapolation; its stencil reaches 2h.
double numeric_curvature(const MetricField& field, ComplexPoint z, double h, int order = 2);

/// Step for numeric_curvature of the given order: 1e-4 (order 2) or 1e-2
/// (order 4) times the smaller of the local scale and the distance to the
/// outer boundary, capped so the stencil stays inside.
double default_curvature_step(const MetricField& field, ComplexPoint z, int order = 2);

}  // namespace conformal
