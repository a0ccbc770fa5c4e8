#include "conformal/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

#include <Eigen/Dense>

#include "conformal/bounds.hpp"
#include "conformal/errors.hpp"
#include "conformal/finite_difference.hpp"

namespace conformal {

namespace {

constexpr double kAngleOffset = 0.1;

double angle(int a, int count) { return kAngleOffset + 2.0 * M_PI * a / count; }

void require_decreasing(std::span<const double> radii, std::size_t minimum, const char* who) {
  if (radii.size() < minimum) {
    throw ParameterError(std::string(who) + ": need at least " + std::to_string(minimum) + " radii");
  }
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0) || (i > 0 && !(radii[i] < radii[i - 1]))) {
      throw ParameterError(std::string(who) + ": radii must be positive and strictly decreasing");
    }
  }
}

/// Neville tableau in x = 1/L evaluated at x = 0.
LimitEstimate neville(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t m = y.size();
  std::vector<double> prev(y);
  std::vector<double> last_row{y.back()};
  for (std::size_t k = 1; k < m; ++k) {
    std::vector<double> cur(m - k);
    for (std::size_t i = k; i < m; ++i) {
      cur[i - k] = (-x[i - k] * prev[i - k + 1] + x[i] * prev[i - k]) / (x[i] - x[i - k]);
    }
    last_row.push_back(cur.back());
    prev.swap(cur);
  }
  LimitEstimate out;
  out.value = last_row.front();
  out.extrapolation_error = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < last_row.size(); ++k) {
    const double inc = std::abs(last_row[k] - last_row[k - 1]);
    if (inc < out.extrapolation_error) {
      out.extrapolation_error = inc;
      out.value = last_row[k];
    }
  }
  if (last_row.size() == 1) out.extrapolation_error = 0.0;

  // Two or more sign changes among the last three raw increments.
  if (m >= 4) {
    const double scale = std::max(std::abs(y.back()), 1e-300);
    int changes = 0;
    double prev_d = 0.0;
    for (std::size_t i = m - 3; i < m; ++i) {
      const double d = y[i] - y[i - 1];
      if (std::abs(d) <= 1e-12 * scale) continue;
      if (prev_d != 0.0 && (d > 0.0) != (prev_d > 0.0)) ++changes;
      prev_d = d;
    }
    out.oscillating = changes >= 2;
  }
  return out;
}

LimitEstimate limit_of(const std::vector<RadialSample>& s) {
  std::vector<double> x;
  std::vector<double> y;
  for (const auto& p : s) {
    x.push_back(1.0 / -std::log(p.r));
    y.push_back(p.value);
  }
  auto out = neville(x, y);
  out.raw_tail = s.back();
  return out;
}

std::vector<double> limit_radii(const MetricField& field, const LimitOptions& opt) {
  if (!opt.radii.empty()) {
    require_decreasing(opt.radii, 4, "limit evaluation");
    return opt.radii;
  }
  const auto& d = field.domain();
  return default_limit_radii(std::min(1.0, d.outer_radius));
}

int angles_or(const LimitOptions& opt, int fallback) {
  if (opt.angles < 0) throw ParameterError("angle sample count must be >= 0");
  return opt.angles == 0 ? fallback : opt.angles;
}

std::complex<double> wirtinger(const ScalarField& f, int n_bar, int n_hol, ComplexPoint z, const PuncturedDisk& d) {
  const int n = n_bar + n_hol;
  if (n == 0) return f(z);
  return wirtinger_deriv(f, n_bar, n_hol, z, default_step(z, n, d), d).value;
}

/// Mean over the angle sample of g(z) on the circle |z - center| = r.
template <class G>
double circle_mean(const PuncturedDisk& d, double r, int angles, G&& g) {
  double sum = 0.0;
  for (int a = 0; a < angles; ++a) {
    const auto z = d.center + ComplexPoint::polar(r, angle(a, angles));
    sum += g(z);
  }
  return sum / angles;
}

double factorial(int n) {
  double out = 1.0;
  for (int i = 2; i <= n; ++i) out *= i;
  return out;
}

std::complex<double> ipow(std::complex<double> w, int n) {
  std::complex<double> out(1.0, 0.0);
  for (int i = 0; i < n; ++i) out *= w;
  return out;
}

}  // namespace

std::vector<double> default_limit_radii(double scale) {
  std::vector<double> out;
  for (double L : {4.0, 6.0, 8.0, 12.0, 16.0, 24.0, 32.0, 48.0, 64.0}) out.push_back(scale * std::exp(-L));
  return out;
}

std::vector<double> default_rate_radii(double scale) {
  std::vector<double> out;
  for (int k = 8; k <= 32; ++k) out.push_back(scale * std::ldexp(1.0, -k));
  return out;
}

OrderEstimate estimate_order(const MetricField& field, std::span<const double> radii, int angles) {
  require_decreasing(radii, 4, "estimate_order");
  if (angles < 1) throw ParameterError("estimate_order: need at least one angle");
  const auto& d = field.domain();
  OrderEstimate out;
  for (double r : radii) {
    double m = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < angles; ++a) m = std::max(m, field.log_density(d.center + ComplexPoint::polar(r, angle(a, angles))));
    out.samples.push_back({r, m});
  }
  // Local slopes dM/dL at the midpoints, then L -> infinity.
  std::vector<double> x;
  std::vector<double> y;
  for (std::size_t k = 0; k + 1 < out.samples.size(); ++k) {
    const double L0 = -std::log(out.samples[k].r);
    const double L1 = -std::log(out.samples[k + 1].r);
    x.push_back(2.0 / (L0 + L1));
    y.push_back((out.samples[k + 1].value - out.samples[k].value) / (L1 - L0));
  }
  const auto lim = neville(x, y);
  out.alpha = lim.value;
  out.regression_residual = lim.extrapolation_error;
  out.converged = !lim.oscillating && std::isfinite(lim.value);
  return out;
}

RateFit fit_rate(std::span<const RadialSample> samples) {
  if (samples.size() < 5) throw ParameterError("fit_rate: need at least 5 samples");
  const auto m = static_cast<Eigen::Index>(samples.size());
  Eigen::MatrixXd A(m, 3);
  Eigen::VectorXd b(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& s = samples[static_cast<std::size_t>(i)];
    if (!(s.r > 0.0 && s.r < 1.0)) throw ParameterError("fit_rate: radii must lie in (0, 1)");
    if (i > 0 && !(s.r < samples[static_cast<std::size_t>(i - 1)].r)) {
      throw ParameterError("fit_rate: radii must be strictly decreasing");
    }
    if (!(s.value > 0.0) || !std::isfinite(s.value)) {
      std::ostringstream os;
      os << "fit_rate: g must be positive and finite, got " << s.value << " at r = " << s.r;
      throw ParameterError(os.str());
    }
    A(i, 0) = 1.0;
    A(i, 1) = std::log(s.r);
    A(i, 2) = std::log(-std::log(s.r));
    b(i) = std::log(s.value);
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (!(sv(2) > 1e-10 * sv(0))) {
    throw ParameterError("fit_rate: degenerate design matrix (radii too clustered)");
  }
  const Eigen::VectorXd c = svd.solve(b);
  const Eigen::VectorXd res = A * c - b;
  const double mean = b.mean();
  const double ss_tot = (b.array() - mean).square().sum();
  const double ss_res = res.squaredNorm();
  RateFit out;
  out.C = std::exp(c(0));
  out.p = c(1);
  out.q = c(2);
  out.r_squared = ss_tot > 0.0 ? std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0) : 1.0;
  return out;
}

LimitEstimate richardson_limit(std::span<const RadialSample> samples) {
  if (samples.size() < 4) throw ParameterError("richardson_limit: need at least 4 samples");
  std::vector<RadialSample> s(samples.begin(), samples.end());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!(s[i].r > 0.0 && s[i].r < 1.0) || (i > 0 && !(s[i].r < s[i - 1].r))) {
      throw ParameterError("richardson_limit: radii must lie in (0, 1) and strictly decrease");
    }
  }
  return limit_of(s);
}

std::optional<std::pair<double, std::optional<double>>> predicted_rate(double alpha, int n_bar, int n_hol) {
  const int n = n_bar + n_hol;
  if (n < 1 || n_bar < 0 || n_hol < 0) throw ParameterError("predicted_rate: need a derivative of order >= 1");
  if (singularity_kind(alpha) == SingularityKind::cusp) {
    const bool mixed = n_bar > 0 && n_hol > 0;
    return std::make_pair(-static_cast<double>(n), std::optional<double>(mixed ? -3.0 : -2.0));
  }
  if (n == 1) return std::make_pair(alpha > 0.5 ? 1.0 - 2.0 * alpha : 0.0, std::optional<double>());
  if (alpha > 0.0) return std::make_pair(2.0 - 2.0 * alpha - n, std::optional<double>());
  if (n == 2) return std::make_pair(0.0, std::optional<double>());
  return std::nullopt;
}

RateCheck remainder_rate(const RemainderFunction& rem, const PuncturedDisk& domain, int n_bar, int n_hol,
                         const RateOptions& opt) {
  const int n = n_bar + n_hol;
  if (n < 1 || n > 5 || n_bar < 0 || n_hol < 0) throw ParameterError("remainder_rate: need 1 <= n_bar + n_hol <= 5");
  if (opt.angles < 1) throw ParameterError("remainder_rate: need at least one angle");
  const auto radii = opt.radii.empty() ? default_rate_radii(std::min(1.0, domain.outer_radius)) : opt.radii;
  require_decreasing(radii, 5, "remainder_rate");
  std::vector<RadialSample> samples;
  for (double r : radii) {
    double g = 0.0;
    for (int a = 0; a < opt.angles; ++a) {
      const auto z = domain.center + ComplexPoint::polar(r, angle(a, opt.angles));
      g = std::max(g, std::abs(wirtinger(rem.eval, n_bar, n_hol, z, domain)));
    }
    samples.push_back({r, g});
  }
  RateCheck out;
  out.n_bar = n_bar;
  out.n_hol = n_hol;
  out.fit = fit_rate(samples);
  const auto pred = predicted_rate(rem.alpha, n_bar, n_hol);
  if (!pred) {
    out.consistent = true;
    return out;
  }
  out.predicted_p = pred->first;
  out.predicted_q = pred->second;
  const double dp = out.fit.p - pred->first;
  const bool q_match = !pred->second || std::abs(out.fit.q - *pred->second) <= opt.q_tolerance;
  const bool q_below = !pred->second || out.fit.q <= *pred->second + opt.q_tolerance;
  out.sharp = std::abs(dp) <= opt.p_tolerance && q_match;
  out.consistent = dp > opt.p_tolerance || (std::abs(dp) <= opt.p_tolerance && q_below);
  return out;
}

std::vector<RateCheck> check_remainder_rates(const RemainderFunction& rem, const PuncturedDisk& domain, int n,
                                             const RateOptions& opt) {
  if (n < 1 || n > 5) throw ParameterError("check_remainder_rates: need 1 <= n <= 5");
  std::vector<RateCheck> out;
  for (int nb = 0; nb <= n; ++nb) out.push_back(remainder_rate(rem, domain, nb, n - nb, opt));
  return out;
}

LimitEstimate minda_limit(const MetricField& field, const LimitOptions& opt) {
  const auto& d = field.domain();
  const int angles = angles_or(opt, 8);
  std::vector<RadialSample> s;
  for (double r : limit_radii(field, opt)) {
    const double L = -std::log(r);
    s.push_back({r, circle_mean(d, r, angles, [&](ComplexPoint z) { return r * L * field(z); })});
  }
  return limit_of(s);
}

CuspDerivativeLimits cusp_derivative_limits(const MetricField& field, double kappa0, const LimitOptions& opt) {
  if (!(kappa0 < 0.0)) throw ParameterError("cusp_derivative_limits: kappa0 must be negative");
  const auto& d = field.domain();
  const int angles = angles_or(opt, 8);
  const auto lambda = field.density_field();
  std::vector<RadialSample> s1, s2, s3;
  for (double r : limit_radii(field, opt)) {
    const double L = -std::log(r);
    auto at = [&](int nb, int nh, int power) {
      return circle_mean(d, r, angles, [&](ComplexPoint z) {
        const auto w = (z - d.center).value();
        return std::real(ipow(w, power) * wirtinger(lambda, nb, nh, z, d)) * r * L;
      });
    };
    s1.push_back({r, at(0, 1, 1)});
    s2.push_back({r, at(0, 2, 2)});
    s3.push_back({r, at(1, 1, 0) * r * r});
  }
  const double root = std::sqrt(-kappa0);
  return {limit_of(s1), limit_of(s2), limit_of(s3), -0.5 / root, 0.75 / root, 0.25 / root};
}

ULimitReport u_deriv_limits(const ScalarField& u, const PuncturedDisk& domain, double alpha, int n_bar, int n_hol,
                            const LimitOptions& opt) {
  const int n = n_bar + n_hol;
  if (n < 1 || n > 5 || n_bar < 0 || n_hol < 0) throw ParameterError("u_deriv_limits: need 1 <= n1 + n2 <= 5");
  const auto kind = singularity_kind(alpha);
  const int angles = angles_or(opt, 8);
  std::vector<double> radii = opt.radii;
  if (radii.empty()) radii = default_limit_radii(std::min(1.0, domain.outer_radius));
  require_decreasing(radii, 4, "u_deriv_limits");
  const bool mixed = n_bar > 0 && n_hol > 0;
  std::vector<RadialSample> plain, rescaled;
  for (double r : radii) {
    const double L = -std::log(r);
    const double v = circle_mean(domain, r, angles, [&](ComplexPoint z) {
      const auto w = (z - domain.center).value();
      return std::real(ipow(std::conj(w), n_bar) * ipow(w, n_hol) * wirtinger(u, n_bar, n_hol, z, domain));
    });
    plain.push_back({r, v});
    rescaled.push_back({r, v * L * L});
  }
  ULimitReport out;
  out.limit = limit_of(plain);
  out.expected = mixed ? 0.0 : 0.5 * alpha * ((n % 2 == 0) ? 1.0 : -1.0) * factorial(n - 1);
  if (mixed && kind == SingularityKind::cusp) {
    out.rescaled = limit_of(rescaled);
    out.rescaled_expected_magnitude = factorial(n_bar - 1) * factorial(n_hol - 1) / 4.0;
  }
  return out;
}

namespace {

std::vector<LTableEntry> table(const MetricField& field, int n, const LimitOptions& opt, bool cusp, double alpha,
                               const std::function<double(int, int)>& closed) {
  if (n < 0 || n > 4) throw ParameterError("l_table: need 0 <= n <= 4");
  const auto& d = field.domain();
  const int angles = angles_or(opt, 8);
  const auto lambda = field.density_field();
  const auto radii = limit_radii(field, opt);
  std::vector<LTableEntry> out;
  for (int nb = 0; nb <= n; ++nb) {
    for (int nh = 0; nb + nh <= n; ++nh) {
      std::vector<RadialSample> s;
      const double norm = 1.0 / (factorial(nb) * factorial(nh));
      for (double r : radii) {
        const double weight = cusp ? r * -std::log(r) : std::pow(r, alpha);
        s.push_back({r, norm * weight * circle_mean(d, r, angles, [&](ComplexPoint z) {
                          const auto w = (z - d.center).value();
                          return std::real(ipow(std::conj(w), nb) * ipow(w, nh) * wirtinger(lambda, nb, nh, z, d));
                        })});
      }
      out.push_back({nb, nh, limit_of(s), closed(nb, nh)});
    }
  }
  return out;
}

}  // namespace

std::vector<LTableEntry> l_table(const MetricField& field, const CuspMode& mode, int n, const LimitOptions& opt) {
  if (!(mode.kappa0 < 0.0)) throw ParameterError("l_table: cusp kappa0 must be negative");
  const double root = std::sqrt(-mode.kappa0);
  return table(field, n, opt, true, 1.0,
               [root](int nb, int nh) { return binom_general(-0.5, nb) * binom_general(-0.5, nh) / root; });
}

std::vector<LTableEntry> l_table(const MetricField& field, const CornerMode& mode, int n, const LimitOptions& opt) {
  if (!(mode.alpha < 1.0)) throw ParameterError("l_table: corner order must be < 1");
  const double lp = mode.l_prime ? *mode.l_prime : sk_limsup(field, mode.alpha, opt).value;
  const double a = mode.alpha;
  return table(field, n, opt, false, a,
               [a, lp](int nb, int nh) { return binom_general(-a / 2, nb) * binom_general(-a / 2, nh) * lp; });
}

LimitEstimate sk_limsup(const MetricField& field, double alpha, const LimitOptions& opt) {
  if (!(alpha < 1.0)) throw ParameterError("sk_limsup: corner order must be < 1");
  const auto& d = field.domain();
  const int angles = angles_or(opt, 64);
  std::vector<RadialSample> raw;
  for (double r : limit_radii(field, opt)) {
    double m = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < angles; ++a) {
      m = std::max(m, std::pow(r, alpha) * field(d.center + ComplexPoint::polar(r, angle(a, angles))));
    }
    raw.push_back({r, m});
  }
  // Upper envelope: sup over all smaller radii.
  std::vector<RadialSample> env(raw);
  for (std::size_t k = env.size() - 1; k-- > 0;) env[k].value = std::max(env[k].value, env[k + 1].value);
  auto out = limit_of(env);
  const std::size_t m = raw.size();
  const double growth = raw[m - 1].value - raw[m - 2].value;
  if (growth > 1e-6 * std::abs(raw[m - 1].value) && raw[m - 2].value > raw[m - 3].value) out.oscillating = true;
  out.raw_tail = raw.back();
  return out;
}

}  // namespace conformal
