#pragma once

#include <optional>
#include <span>
#include <vector>

#include "conformal/metrics.hpp"
#include "conformal/solver.hpp"

namespace conformal {

struct RadialSample {
  double r;
  double value;
};

struct OrderEstimate {
  double alpha = 0.0;
  /// (r, M_u(r)) with M_u(r) the maximum of log lambda over the angle sample.
  std::vector<RadialSample> samples;
  double regression_residual = 0.0;
  bool converged = true;
};

/// g(r) ~ C r^p (log 1/r)^q.
struct RateFit {
  double p = 0.0;
  double q = 0.0;
  double C = 0.0;
  double r_squared = 0.0;
};

struct LimitEstimate {
  double value = 0.0;
  RadialSample raw_tail{0.0, 0.0};
  double extrapolation_error = 0.0;
  bool oscillating = false;
};

/// Sample plan shared by the limit evaluations.
struct LimitOptions {
  /// Decreasing radii; empty means default_limit_radii(outer radius of the field's domain).
  std::vector<double> radii;
  /// Angle samples per radius; 0 picks the operation default (8 for limits,
  /// 64 for sk_limsup).
  int angles = 0;
};

/// r = scale * e^{-L} for L in {4, 6, 8, 12, 16, 24, 32, 48, 64}.
std::vector<double> default_limit_radii(double scale = 1.0);
/// r = scale * 2^{-k} for k = 8..32.
std::vector<double> default_rate_radii(double scale = 1.0);

/// alpha = lim M_u(r) / log(1/r), extrapolated from local slopes dM/dL.
OrderEstimate estimate_order(const MetricField& field, std::span<const double> radii, int angles = 64);

/// Least squares of log g against (1, log r, log log(1/r)). Needs >= 5
/// samples with 0 < r < 1 strictly decreasing and g > 0.
RateFit fit_rate(std::span<const RadialSample> samples);

/// Neville extrapolation of g(r) = g0 + c1/L + c2/L^2 + ... to L = infinity.
/// The returned entry is the last-row entry with the smallest increment.
LimitEstimate richardson_limit(std::span<const RadialSample> samples);

struct RateCheck {
  int n_bar = 0;
  int n_hol = 0;
  RateFit fit;
  std::optional<double> predicted_p;
  std::optional<double> predicted_q;
  /// The fitted growth does not exceed the predicted bound (within tolerance).
  bool consistent = false;
  /// The fitted exponents match the prediction (within tolerance).
  bool sharp = false;
};

struct RateOptions {
  std::vector<double> radii;  // empty: default_rate_radii(outer radius)
  int angles = 4;
  double p_tolerance = 0.05;
  double q_tolerance = 0.3;
};

/// Predicted (p, q) for dbar^n_bar d^n_hol of the remainder of order alpha,
/// or nullopt where no rate is asserted.
std::optional<std::pair<double, std::optional<double>>> predicted_rate(double alpha, int n_bar, int n_hol);

/// Fits |dbar^n_bar d^n_hol rem| along the radii (maximum over angles).
RateCheck remainder_rate(const RemainderFunction& rem, const PuncturedDisk& domain, int n_bar, int n_hol,
                         const RateOptions& opt = {});

/// remainder_rate for every pattern n_bar + n_hol = n, 1 <= n <= 5.
std::vector<RateCheck> check_remainder_rates(const RemainderFunction& rem, const PuncturedDisk& domain, int n,
                                             const RateOptions& opt = {});

/// lim |z-p| log(1/|z-p|) lambda(z); field centred at p = domain().center.
LimitEstimate minda_limit(const MetricField& field, const LimitOptions& opt = {});

struct CuspDerivativeLimits {
  LimitEstimate first;   // (z-p)|z-p| L lambda_z
  LimitEstimate second;  // (z-p)^2 |z-p| L lambda_zz
  LimitEstimate mixed;   // |z-p|^3 L lambda_{z zbar}
  double expected_first;
  double expected_second;
  double expected_mixed;
};

CuspDerivativeLimits cusp_derivative_limits(const MetricField& field, double kappa0, const LimitOptions& opt = {});

struct ULimitReport {
  LimitEstimate limit;
  double expected = 0.0;
  /// Cusp, mixed: zbar^n1 z^n2 L^2 dbar^n1 d^n2 u.
  std::optional<LimitEstimate> rescaled;
  /// (n1-1)!(n2-1)!/4; only the magnitude is asserted.
  std::optional<double> rescaled_expected_magnitude;
};

/// zbar^n1 z^n2 dbar^n1 d^n2 u along shrinking radii. Pure patterns tend to
/// (alpha/2)(-1)^n (n-1)!, mixed ones to 0. n1 + n2 <= 5.
ULimitReport u_deriv_limits(const ScalarField& u, const PuncturedDisk& domain, double alpha, int n_bar,
                            int n_hol, const LimitOptions& opt = {});

struct LTableEntry {
  int n_bar = 0;
  int n_hol = 0;
  LimitEstimate numeric;
  double closed_form = 0.0;
};

struct CuspMode {
  double kappa0;
};
struct CornerMode {
  double alpha;
  /// l' = lim |z|^alpha lambda; computed by sk_limsup when absent.
  std::optional<double> l_prime;
};

/// l_{n1,n2} for n1 + n2 <= n (n <= 4), row-major in (n_bar, n_hol).
std::vector<LTableEntry> l_table(const MetricField& field, const CuspMode& mode, int n, const LimitOptions& opt = {});
std::vector<LTableEntry> l_table(const MetricField& field, const CornerMode& mode, int n,
                                 const LimitOptions& opt = {});

/// limsup |z|^alpha lambda(z): maximum over angles per radius, then the
/// extrapolated envelope. oscillating is set when the envelope keeps growing.
LimitEstimate sk_limsup(const MetricField& field, double alpha, const LimitOptions& opt = {});

}  // namespace conformal
