#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>

#include "conformal/complex_point.hpp"
#include "conformal/multi_index.hpp"
#include "doctest.h"

namespace testing {

/// Seeded generator for property cases. The seed is printed on failure.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }
  double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }

  conformal::ComplexPoint point_in_annulus(double r_lo, double r_hi) {
    return conformal::ComplexPoint::polar(uniform(r_lo, r_hi), uniform(-M_PI, M_PI));
  }
  conformal::ComplexPoint log_point_in_annulus(double r_lo, double r_hi) {
    return conformal::ComplexPoint::polar(log_uniform(r_lo, r_hi), uniform(-M_PI, M_PI));
  }
  conformal::MultiIndex multi_index(int min_order, int max_order) {
    const int n = integer(min_order, max_order);
    const int j1 = integer(0, n);
    return {j1, n - j1};
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

/// Runs `property(gen, case_index)` for `cases` cases from one seed.
template <class Property>
void for_all(int cases, std::uint64_t seed, Property property) {
  Gen gen(seed);
  for (int k = 0; k < cases; ++k) {
    CAPTURE(seed);
    CAPTURE(k);
    property(gen, k);
  }
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// Independent closed forms used as oracles.

/// (1-alpha) / (2t sinh((1-alpha) log(R/t))), or 1/(2t log(R/t)) at alpha = 1.
inline double lambda_oracle(double alpha, double R, double t) {
  const double L = std::log(R / t);
  if (alpha == 1.0) return 1.0 / (2.0 * t * L);
  const double b = 1.0 - alpha;
  return b / (2.0 * t * std::sinh(b * L));
}

inline double log_lambda_oracle(double alpha, double R, double t) { return std::log(lambda_oracle(alpha, R, t)); }

}  // namespace testing
