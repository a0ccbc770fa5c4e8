#include "conformal/bounds.hpp"

#include <array>
#include <cmath>
#include <random>
#include <sstream>

#include "conformal/errors.hpp"

namespace conformal {

namespace {

constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

/// Uniform double in [0, 1) from the top 53 bits; identical on every platform.
double unit(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

/// Relative slack for pointwise dominations (equality cases must pass).
constexpr double kDominationSlack = 1e-12;

}  // namespace

double gamma_fn(double x) {
  if (!std::isfinite(x)) throw DomainError("gamma_fn: argument must be finite");
  if (x <= 0.0 && x == std::floor(x)) {
    std::ostringstream os;
    os << "gamma_fn: pole at x = " << x;
    throw SingularPointError(os.str());
  }
  if (x < 0.5) return M_PI / (std::sin(M_PI * x) * gamma_fn(1.0 - x));
  const double y = x - 1.0;
  double sum = kLanczos[0];
  for (std::size_t i = 1; i < kLanczos.size(); ++i) sum += kLanczos[i] / (y + static_cast<double>(i));
  const double t = y + kLanczosG + 0.5;
  return std::sqrt(2.0 * M_PI) * std::pow(t, y + 0.5) * std::exp(-t) * sum;
}

double binom_general(double tau, int j) {
  if (j < 0) throw ParameterError("binom_general: j must be >= 0");
  double out = 1.0;
  for (int i = 0; i < j; ++i) out *= (tau - i) / (i + 1);
  return out;
}

ThreePunctureParams::ThreePunctureParams(double alpha, double beta, double gamma)
    : alpha_(alpha), beta_(beta), gamma_(gamma) {
  std::ostringstream os;
  if (!(alpha > 0.0 && alpha < 1.0) || !(beta > 0.0 && beta < 1.0) || !(gamma > 0.0 && gamma <= 1.0)) {
    os << "ThreePunctureParams: need alpha, beta in (0,1) and gamma in (0,1], got (" << alpha << ", " << beta
       << ", " << gamma << ")";
    throw ParameterError(os.str());
  }
  if (!(alpha + beta + gamma > 2.0)) {
    os << "ThreePunctureParams: alpha + beta + gamma = " << alpha + beta + gamma << " must exceed 2";
    throw ParameterError(os.str());
  }
}

ThreePunctureParams ThreePunctureParams::at(PunctureSite site) const {
  switch (site) {
    case PunctureSite::zero:
      return *this;
    case PunctureSite::one:
      return {beta_, alpha_, gamma_};
    case PunctureSite::infinity:
      return {gamma_, beta_, alpha_};
  }
  return *this;
}

DeltaBound delta_three_puncture(const ThreePunctureParams& p) {
  const double a = p.a();
  const double b = p.b();
  const double c = p.c();
  auto g = [](double x, const char* label) {
    try {
      return gamma_fn(x);
    } catch (const SingularPointError&) {
      std::ostringstream os;
      os << "delta_three_puncture: Gamma pole at " << label << " = " << x;
      throw SingularPointError(os.str());
    }
  };
  const double num = g(1.0 - a, "1-a") * g(1.0 - b, "1-b") * g(a + 1.0 - c, "a+1-c") * g(b + 1.0 - c, "b+1-c");
  const double den = g(a, "a") * g(b, "b") * g(c - a, "c-a") * g(c - b, "c-b");
  const double ratio = num / den;
  if (!(ratio > 0.0) || !std::isfinite(ratio)) {
    std::ostringstream os;
    os << "delta_three_puncture: Gamma ratio " << ratio << " is not positive";
    throw DomainError(os.str());
  }
  DeltaBound out;
  out.delta = g(c, "c") / g(2.0 - c, "2-c") * std::sqrt(ratio);
  if (out.delta == 1.0) throw DomainError("delta_three_puncture: delta = 1 makes the bound infinite");
  out.bound = out.delta * (1.0 - p.alpha()) / (1.0 - out.delta * out.delta);
  return out;
}

std::vector<ComplexPoint> random_annulus_points(std::uint64_t seed, int count, ComplexPoint center, double r_lo,
                                                double r_hi) {
  if (count < 0 || !(r_lo >= 0.0) || !(r_hi > r_lo)) throw ParameterError("random_annulus_points: bad annulus");
  std::mt19937_64 gen(seed);
  std::vector<ComplexPoint> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    // Area-uniform radius.
    const double r = std::sqrt(r_lo * r_lo + unit(gen) * (r_hi * r_hi - r_lo * r_lo));
    const double t = 2.0 * M_PI * unit(gen);
    out.push_back(center + ComplexPoint::polar(r, t));
  }
  return out;
}

Verdict sk_spot_check(const MetricField& field, const std::vector<ComplexPoint>& sample, const SpotCheckOptions& opt) {
  const auto& d = field.domain();
  auto points = sample;
  const auto extra = random_annulus_points(opt.seed, opt.random_points, d.center,
                                           std::max(0.05 * d.outer_radius, d.inner_radius), 0.9 * d.outer_radius);
  points.insert(points.end(), extra.begin(), extra.end());
  Verdict v;
  v.sk_ok = true;
  v.sk_worst_curvature = -std::numeric_limits<double>::infinity();
  for (const auto& z : points) {
    const double k = numeric_curvature(field, z, default_curvature_step(field, z, 4), 4);
    if (k > v.sk_worst_curvature) {
      v.sk_worst_curvature = k;
      v.sk_witness = z;
    }
  }
  v.sk_ok = points.empty() || v.sk_worst_curvature <= -4.0 + opt.curvature_tolerance;
  v.pass = v.sk_ok;
  v.measured = v.sk_worst_curvature;
  v.expected = -4.0;
  v.margin = -4.0 + opt.curvature_tolerance - v.sk_worst_curvature;
  v.witness = v.sk_witness;
  if (!v.sk_ok) {
    std::ostringstream os;
    os << "SK spot-check failed: curvature " << v.sk_worst_curvature << " > -4 + " << opt.curvature_tolerance;
    v.reason = os.str();
  }
  return v;
}

Verdict corner_bound_check(const MetricField& field, double alpha, const CornerBoundOptions& opt) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ParameterError("corner_bound_check: alpha must lie in (0, 1)");
  Verdict v = sk_spot_check(field, {}, opt.spot);
  v.expected = 1.0 - alpha;
  if (!v.sk_ok) {
    v.pass = false;
    return v;
  }
  const auto& d = field.domain();
  const auto radii = opt.limits.radii.empty() ? default_limit_radii(std::min(1.0, d.outer_radius)) : opt.limits.radii;
  const auto order = estimate_order(field, radii);
  if (std::abs(order.alpha - alpha) > opt.order_tolerance) {
    std::ostringstream os;
    os << "order mismatch: estimated " << order.alpha << ", claimed " << alpha;
    v.pass = false;
    v.reason = os.str();
    v.measured = order.alpha;
    v.expected = alpha;
    v.margin = -std::abs(order.alpha - alpha);
    return v;
  }
  const auto l = sk_limsup(field, alpha, opt.limits);
  v.measured = l.value;
  v.margin = v.expected - l.value;
  v.witness.reset();
  v.pass = l.value <= v.expected + opt.tolerance && !l.oscillating;
  if (!v.pass) {
    std::ostringstream os;
    os << "limsup |z|^alpha lambda = " << l.value << " exceeds 1 - alpha = " << v.expected;
    v.reason = os.str();
  }
  return v;
}

namespace {

Verdict domination(const MetricField& sigma, const std::vector<ComplexPoint>& sample,
                   const std::function<double(ComplexPoint)>& bound, Verdict v) {
  v.margin = std::numeric_limits<double>::infinity();
  v.witness.reset();
  for (const auto& z : sample) {
    const double s = sigma(z);
    const double b = bound(z);
    const double m = b - s;
    if (m < v.margin) {
      v.margin = m;
      v.witness = z;
      v.measured = s;
      v.expected = b;
    }
    if (s > b * (1.0 + kDominationSlack)) {
      std::ostringstream os;
      os << "domination violated at (" << z.re() << ", " << z.im() << "): sigma = " << s << " > bound = " << b;
      v.pass = false;
      v.reason = os.str();
      v.margin = m;
      v.witness = z;
      v.measured = s;
      v.expected = b;
      return v;
    }
  }
  v.pass = true;
  v.reason.clear();
  return v;
}

}  // namespace

Verdict ahlfors_check(const MetricField& sigma, const std::vector<ComplexPoint>& sample, const SpotCheckOptions& opt) {
  Verdict v = sk_spot_check(sigma, sample, opt);
  if (!v.sk_ok) {
    v.reason = "check refused: " + v.reason;
    return v;
  }
  return domination(sigma, sample, [](ComplexPoint z) { return hyperbolic_disk_density(z); }, v);
}

Verdict maximality_check(const MetricField& sigma, double alpha, double R, const std::vector<ComplexPoint>& sample,
                         const SpotCheckOptions& opt) {
  const LambdaAlphaRParams params(alpha, R);
  Verdict v = sk_spot_check(sigma, sample, opt);
  if (!v.sk_ok) {
    v.reason = "check refused: " + v.reason;
    return v;
  }
  const auto& d = sigma.domain();
  const auto order = estimate_order(sigma, default_limit_radii(std::min(1.0, d.outer_radius)));
  if (order.alpha > alpha + 0.02) {
    std::ostringstream os;
    os << "order guard: sigma has order " << order.alpha << " > " << alpha << ", so sigma exceeds the bound near 0";
    v.pass = false;
    v.reason = os.str();
    v.measured = order.alpha;
    v.expected = alpha;
    v.margin = alpha - order.alpha;
    v.witness.reset();
    return v;
  }
  return domination(sigma, sample, [&params](ComplexPoint z) { return lambda_alpha_R(params, z); }, v);
}

}  // namespace conformal
