#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "conformal/asymptotics.hpp"
#include "conformal/metrics.hpp"

namespace conformal {

/// Gamma function (Lanczos, g = 7, with reflection below 1/2). Throws
/// SingularPointError at the poles 0, -1, -2, ...
double gamma_fn(double x);

/// tau(tau-1)...(tau-j+1)/j!, with binom(tau, 0) = 1.
double binom_general(double tau, int j);

enum class PunctureSite { zero, one, infinity };

/// Orders (alpha, beta, gamma) of an SK-metric at 0, 1, infinity.
class ThreePunctureParams {
 public:
  /// Needs alpha, beta in (0,1), gamma in (0,1] and alpha + beta + gamma > 2.
  ThreePunctureParams(double alpha, double beta, double gamma);

  /// The same metric seen from another puncture: a Moebius map sending the
  /// site to 0 permutes the orders (1 - z swaps 0 and 1, 1/z swaps 0 and
  /// infinity). This reading of the formula at 1 and infinity is an
  /// interpretation.
  ThreePunctureParams at(PunctureSite site) const;

  double alpha() const noexcept { return alpha_; }
  double beta() const noexcept { return beta_; }
  double gamma() const noexcept { return gamma_; }
  double a() const noexcept { return 0.5 * (alpha_ + beta_ - gamma_); }
  double b() const noexcept { return 0.5 * (alpha_ + beta_ + gamma_ - 2.0); }
  double c() const noexcept { return alpha_; }

 private:
  double alpha_;
  double beta_;
  double gamma_;
};

struct DeltaBound {
  double delta = 0.0;
  /// delta (1 - alpha) / (1 - delta^2).
  double bound = 0.0;
};

DeltaBound delta_three_puncture(const ThreePunctureParams& p);

struct SpotCheckOptions {
  std::uint64_t seed = 0;
  int random_points = 32;
  double curvature_tolerance = 1e-3;
};

/// Outcome of a comparison or bound check, with the worst point found.
struct Verdict {
  bool pass = false;
  std::string reason;
  double measured = 0.0;
  double expected = 0.0;
  /// expected - measured for bounds; minimum of bound - sigma for dominations.
  double margin = 0.0;
  std::optional<ComplexPoint> witness;
  bool sk_ok = false;
  double sk_worst_curvature = 0.0;
  std::optional<ComplexPoint> sk_witness;
};

/// Numeric curvature <= -4 + tol at the sample and at seeded random points
/// of the annulus 0.05 R < |z - c| < 0.9 R of the field's domain.
Verdict sk_spot_check(const MetricField& field, const std::vector<ComplexPoint>& sample,
                      const SpotCheckOptions& opt = {});

struct CornerBoundOptions {
  double tolerance = 0.01;
  /// Largest accepted |estimate_order - alpha|.
  double order_tolerance = 0.02;
  LimitOptions limits;
  SpotCheckOptions spot;
};

/// limsup |z|^alpha lambda <= 1 - alpha for an SK-metric of corner order alpha.
Verdict corner_bound_check(const MetricField& field, double alpha, const CornerBoundOptions& opt = {});

/// sigma <= lambda_D at every sample point, after an SK spot check.
Verdict ahlfors_check(const MetricField& sigma, const std::vector<ComplexPoint>& sample,
                      const SpotCheckOptions& opt = {});

/// sigma <= lambda_{alpha,R} at every sample point, after an SK spot check and
/// an order guard.
Verdict maximality_check(const MetricField& sigma, double alpha, double R, const std::vector<ComplexPoint>& sample,
                         const SpotCheckOptions& opt = {});

/// Deterministic uniform points in the annulus r_lo < |z - center| < r_hi.
std::vector<ComplexPoint> random_annulus_points(std::uint64_t seed, int count, ComplexPoint center, double r_lo,
                                                double r_hi);

}  // namespace conformal
