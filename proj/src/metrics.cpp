#include "conformal/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "conformal/errors.hpp"

namespace conformal {

namespace {

std::string describe(ComplexPoint z) {
  std::ostringstream os;
  os.precision(17);
  os << "(" << z.re() << ", " << z.im() << ")";
  return os.str();
}

}  // namespace

bool PuncturedDisk::contains(ComplexPoint z) const noexcept {
  const double d = (z - center).abs();
  if (d >= outer_radius) return false;
  if (punctured && d == 0.0) return false;
  return d > inner_radius || (inner_radius == 0.0 && !punctured);
}

bool PuncturedDisk::contains_disk(ComplexPoint z, double rho) const noexcept {
  const double d = (z - center).abs();
  if (d + rho >= outer_radius) return false;
  if (punctured || inner_radius > 0.0) return d - rho > inner_radius;
  return true;
}

double PuncturedDisk::local_scale(ComplexPoint z) const noexcept {
  if (!punctured && inner_radius == 0.0) return 1.0;
  return (z - center).abs();
}

MetricField::MetricField(std::string name, ScalarField density, PuncturedDisk domain,
                         std::optional<double> order_hint, std::optional<double> curvature_hint)
    : name_(std::move(name)),
      density_(std::move(density)),
      domain_(domain),
      order_hint_(order_hint),
      curvature_hint_(curvature_hint) {
  if (!(domain_.outer_radius > 0.0) || domain_.inner_radius < 0.0 ||
      domain_.inner_radius >= domain_.outer_radius) {
    throw ParameterError("MetricField '" + name_ + "': invalid domain radii");
  }
  if (order_hint_ && *order_hint_ > 1.0) {
    throw ParameterError("MetricField '" + name_ + "': order hint exceeds 1");
  }
  if (curvature_hint_ && !(*curvature_hint_ < 0.0)) {
    throw ParameterError("MetricField '" + name_ + "': curvature hint must be negative");
  }
}

double MetricField::operator()(ComplexPoint z) const {
  if (!domain_.contains(z)) {
    throw DomainError("metric '" + name_ + "': point " + describe(z) + " outside the domain");
  }
  const double value = density_(z);
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw DomainError("metric '" + name_ + "': density not positive and finite at " + describe(z));
  }
  return value;
}

double MetricField::log_density(ComplexPoint z) const { return std::log((*this)(z)); }

MetricField MetricField::scaled(double c) const {
  if (!(c > 0.0)) throw ParameterError("MetricField::scaled: factor must be positive");
  std::optional<double> kappa;
  if (curvature_hint_) kappa = *curvature_hint_ / (c * c);
  std::ostringstream os;
  os << c << "*" << name_;
  auto inner = density_;
  return MetricField(os.str(), [inner, c](ComplexPoint z) { return c * inner(z); }, domain_,
                     order_hint_, kappa);
}

MetricField MetricField::restricted(PuncturedDisk domain) const {
  return MetricField(name_, density_, domain, order_hint_, curvature_hint_);
}

ScalarField MetricField::density_field() const {
  return [self = *this](ComplexPoint z) { return self(z); };
}

ScalarField MetricField::log_field() const {
  return [self = *this](ComplexPoint z) { return self.log_density(z); };
}

LambdaAlphaRParams::LambdaAlphaRParams(double alpha, double R) : alpha_(alpha), R_(R) {
  if (!std::isfinite(alpha) || alpha > 1.0) {
    throw ParameterError("lambda_{alpha,R}: alpha must be a finite real <= 1");
  }
  if (!std::isfinite(R) || !(R > 0.0)) throw ParameterError("lambda_{alpha,R}: R must be > 0");
}

double hyperbolic_disk_density(ComplexPoint z) {
  const double t = z.abs();
  if (t >= 1.0) throw DomainError("hyperbolic disk density: |z| >= 1 at " + describe(z));
  return 1.0 / ((1.0 - t) * (1.0 + t));
}

double punctured_disk_density(ComplexPoint z) {
  const double t = z.abs();
  if (t == 0.0 || t >= 1.0) {
    throw DomainError("punctured disk density: need 0 < |z| < 1 at " + describe(z));
  }
  return 1.0 / (2.0 * t * std::log(1.0 / t));
}

double lambda_alpha_R_sinh(const LambdaAlphaRParams& params, ComplexPoint z) {
  const double t = z.abs();
  const double R = params.R();
  const double beta = 1.0 - params.alpha();
  if (t == 0.0 || t >= R) throw DomainError("lambda_{alpha,R}: need 0 < |z| < R at " + describe(z));
  if (beta == 0.0) throw ParameterError("lambda_{alpha,R}: sinh form requires alpha < 1");
  return beta / (2.0 * t * std::sinh(beta * std::log(R / t)));
}

double lambda_alpha_R(const LambdaAlphaRParams& params, ComplexPoint z) {
  const double t = z.abs();
  const double R = params.R();
  const double alpha = params.alpha();
  if (t == 0.0 || t >= R) throw DomainError("lambda_{alpha,R}: need 0 < |z| < R at " + describe(z));
  if (alpha == 1.0) return 1.0 / (2.0 * t * std::log(R / t));
  if (t < 1e-8 * R) return lambda_alpha_R_sinh(params, z);
  const double beta = 1.0 - alpha;
  return beta * std::pow(R, beta) * std::pow(t, -alpha) /
         (std::pow(R, 2.0 * beta) - std::pow(t, 2.0 * beta));
}

MetricField hyperbolic_disk_metric() {
  PuncturedDisk domain{ComplexPoint{}, 0.0, 1.0, false};
  return MetricField("hyperbolic_disk", hyperbolic_disk_density, domain, 0.0, -4.0);
}

MetricField punctured_disk_metric() {
  PuncturedDisk domain{ComplexPoint{}, 0.0, 1.0, true};
  return MetricField("punctured_disk", punctured_disk_density, domain, 1.0, -4.0);
}

MetricField lambda_alpha_R_metric(const LambdaAlphaRParams& params) {
  PuncturedDisk domain{ComplexPoint{}, 0.0, params.R(), true};
  std::ostringstream os;
  os << "lambda_alpha_R(" << params.alpha() << "," << params.R() << ")";
  return MetricField(os.str(), [params](ComplexPoint z) { return lambda_alpha_R(params, z); },
                     domain, params.alpha(), -4.0);
}

MetricField constant_metric(double c, PuncturedDisk domain) {
  if (!(c > 0.0) || !std::isfinite(c)) throw ParameterError("constant metric: value must be > 0");
  std::ostringstream os;
  os << "constant(" << c << ")";
  return MetricField(os.str(), [c](ComplexPoint) { return c; }, domain, 0.0);
}

double pullback_density(const MetricField& metric, ComplexPoint f_value, double f_deriv_abs) {
  if (!(f_deriv_abs >= 0.0) || !std::isfinite(f_deriv_abs)) {
    throw ParameterError("pullback_density: |f'| must be a finite nonnegative real");
  }
  const double density = metric(f_value);
  return f_deriv_abs == 0.0 ? 0.0 : density * f_deriv_abs;
}

namespace {

double five_point_laplacian(const MetricField& field, ComplexPoint z, double center, double h) {
  const double sum = field.log_density(z + ComplexPoint{h, 0.0}) + field.log_density(z - ComplexPoint{h, 0.0}) +
                     field.log_density(z + ComplexPoint{0.0, h}) + field.log_density(z - ComplexPoint{0.0, h});
  return (sum - 4.0 * center) / (h * h);
}

}  // namespace

double numeric_curvature(const MetricField& field, ComplexPoint z, double h, int order) {
  if (!(h > 0.0)) throw ParameterError("numeric_curvature: step must be positive");
  if (order != 2 && order != 4) throw ParameterError("numeric_curvature: order must be 2 or 4");
  const double reach = order == 2 ? h : 2.0 * h;
  if (!field.domain().contains_disk(z, reach)) {
    throw DomainError("numeric_curvature: stencil of step " + std::to_string(h) + " at " +
                      describe(z) + " leaves the domain");
  }
  const double center = field.log_density(z);
  double laplacian = five_point_laplacian(field, z, center, h);
  if (order == 4) laplacian = (4.0 * laplacian - five_point_laplacian(field, z, center, 2.0 * h)) / 3.0;
  const double lambda = std::exp(center);
  return -laplacian / (lambda * lambda);
}

double default_curvature_step(const MetricField& field, ComplexPoint z, int order) {
  if (order != 2 && order != 4) throw ParameterError("default_curvature_step: order must be 2 or 4");
  const auto& domain = field.domain();
  const double d = (z - domain.center).abs();
  const double to_outer = domain.outer_radius - d;
  const double reach = order == 2 ? 1.0 : 2.0;
  double h = (order == 2 ? 1e-4 : 1e-2) * std::max(std::min(domain.local_scale(z), to_outer), 1e-300);
  h = std::min(h, 0.25 * to_outer / reach);
  if (domain.inner_radius > 0.0) h = std::min(h, 0.25 * (d - domain.inner_radius) / reach);
  return h;
}

}  // namespace conformal
