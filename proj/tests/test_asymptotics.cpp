#include <cmath>
#include <vector>

#include "conformal/asymptotics.hpp"
#include "conformal/bounds.hpp"
#include "conformal/errors.hpp"
#include "conformal/metrics.hpp"
#include "conformal/solver.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace conformal;
using testing::for_all;
using testing::Gen;

namespace {

std::vector<RadialSample> synthetic(const std::vector<double>& radii, double (*g)(double)) {
  std::vector<RadialSample> s;
  for (double r : radii) s.push_back({r, g(r)});
  return s;
}

std::vector<double> powers(double base, int lo, int hi) {
  std::vector<double> r;
  for (int k = lo; k <= hi; ++k) r.push_back(std::pow(base, -k));
  return r;
}

MetricField lambda(double alpha, double R = 1.0) { return lambda_alpha_R_metric(LambdaAlphaRParams(alpha, R)); }

PuncturedDisk disk(double R = 1.0) { return {{0.0, 0.0}, 0.0, R, true}; }

ScalarField log_lambda(double alpha, double R = 1.0) {
  return [alpha, R](ComplexPoint z) { return testing::log_lambda_oracle(alpha, R, z.abs()); };
}

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

}  // namespace

TEST_CASE("estimate_order") {
  const auto radii = default_limit_radii();
  CHECK(estimate_order(lambda(0.3), radii).alpha == doctest::Approx(0.3).epsilon(0.01 / 0.3));
  CHECK(std::abs(estimate_order(constant_metric(1.0, disk()), radii).alpha) < 1e-12);
  CHECK(estimate_order(punctured_disk_metric(), radii).alpha == doctest::Approx(1.0).epsilon(0.01));
  for_all(10, 41, [&](Gen& g, int) {
    const double alpha = g.uniform(-2.0, 0.99);
    CHECK(std::abs(estimate_order(lambda(alpha, g.uniform(0.5, 3.0)), radii).alpha - alpha) < 0.01);
  });
  const std::vector<double> few{0.1, 0.01, 0.001};
  CHECK_THROWS_AS(estimate_order(lambda(0.3), few), ParameterError);
}

TEST_CASE("fit_rate") {
  SUBCASE("pure power is exact") {
    const auto fit = fit_rate(synthetic(powers(2.0, 6, 18), [](double r) { return std::pow(r, 1.5); }));
    CHECK(std::abs(fit.p - 1.5) < 1e-10);
    CHECK(std::abs(fit.q) < 1e-10);
    CHECK(fit.C == doctest::Approx(1.0).epsilon(1e-10));
  }
  SUBCASE("power-log data") {
    const auto fit =
        fit_rate(synthetic(powers(2.0, 6, 20), [](double r) { return std::pow(std::log(1.0 / r), -2.0) / r; }));
    CHECK(std::abs(fit.p + 1.0) < 1e-6);
    CHECK(std::abs(fit.q + 2.0) < 1e-6);
    CHECK(fit.r_squared == doctest::Approx(1.0));
  }
  SUBCASE("exact on random power-log data") {
    for_all(50, 42, [](Gen& g, int) {
      const double p = g.uniform(-5.0, 2.0), q = g.uniform(-3.0, 3.0), C = g.log_uniform(1e-3, 1e3);
      std::vector<RadialSample> s;
      for (double r : default_rate_radii()) s.push_back({r, C * std::pow(r, p) * std::pow(std::log(1.0 / r), q)});
      const auto fit = fit_rate(s);
      CHECK(std::abs(fit.p - p) < 1e-8);
      CHECK(std::abs(fit.q - q) < 1e-7);
      CHECK(fit.C == doctest::Approx(C).epsilon(1e-6));
    });
  }
  SUBCASE("robust to 1% noise") {
    for_all(30, 43, [](Gen& g, int) {
      const double p = g.uniform(-4.0, 1.0);
      std::vector<RadialSample> s;
      for (double r : powers(2.0, 6, 18)) s.push_back({r, std::pow(r, p) * (1.0 + g.uniform(-0.01, 0.01))});
      CHECK(std::abs(fit_rate(s).p - p) < 0.05);
    });
  }
  SUBCASE("validation") {
    const auto good = synthetic(powers(2.0, 6, 12), [](double r) { return r; });
    CHECK_THROWS_AS(fit_rate(std::span(good).first(4)), ParameterError);
    auto bad = good;
    bad[2].value = 0.0;
    CHECK_THROWS_AS(fit_rate(bad), ParameterError);
    bad = good;
    std::swap(bad[1], bad[2]);
    CHECK_THROWS_AS(fit_rate(bad), ParameterError);
    std::vector<RadialSample> clustered;
    for (int k = 0; k < 6; ++k) clustered.push_back({0.5 - 1e-15 * k, 1.0});
    CHECK_THROWS(fit_rate(clustered));
  }
}

TEST_CASE("richardson_limit") {
  const auto radii = powers(M_E, 4, 12);
  CHECK(richardson_limit(synthetic(radii, [](double) { return 0.5; })).value == 0.5);
  CHECK(std::abs(richardson_limit(synthetic(radii, [](double r) { return 0.5 - 1.0 / std::log(r); })).value - 0.5) <
        1e-8);
  const auto two = richardson_limit(synthetic(radii, [](double r) {
    const double L = -std::log(r);
    return 0.5 + 1.0 / L + 3.0 / (L * L);
  }));
  CHECK(std::abs(two.value - 0.5) < 1e-6);
  CHECK(two.raw_tail.r == radii.back());
  CHECK(two.extrapolation_error >= 0.0);
  const std::vector<RadialSample> three{{0.1, 1.0}, {0.01, 1.0}, {0.001, 1.0}};
  CHECK_THROWS_AS(richardson_limit(three), ParameterError);
  std::vector<RadialSample> alternating;
  for (std::size_t k = 0; k < radii.size(); ++k) alternating.push_back({radii[k], k % 2 == 0 ? 1.0 : -1.0});
  const auto osc = richardson_limit(alternating);
  CHECK(osc.oscillating);
}

TEST_CASE("predicted rates") {
  auto p_of = [](double a, int nb, int nh) { return predicted_rate(a, nb, nh)->first; };
  CHECK(p_of(0.75, 0, 1) == doctest::Approx(-0.5));
  CHECK(p_of(0.4, 1, 0) == 0.0);
  CHECK(p_of(0.75, 0, 3) == doctest::Approx(-2.5));
  CHECK(p_of(1.0, 1, 1) == -2.0);
  CHECK(*predicted_rate(1.0, 1, 1)->second == -3.0);
  CHECK(*predicted_rate(1.0, 0, 2)->second == -2.0);
  CHECK(p_of(-1.0, 1, 1) == 0.0);
  CHECK_FALSE(predicted_rate(-1.0, 0, 3).has_value());
  CHECK_THROWS_AS(predicted_rate(0.5, 0, 0), ParameterError);
}

TEST_CASE("remainder rates on closed forms") {
  const auto corner = extract_remainder(log_lambda(0.75), 0.75);
  SUBCASE("corner first derivative") {
    const auto c = remainder_rate(corner, disk(), 0, 1);
    CHECK(c.fit.p == doctest::Approx(-0.5).epsilon(0.1));
    CHECK(c.sharp);
  }
  SUBCASE("corner third pure derivative") {
    const auto c = remainder_rate(corner, disk(), 0, 3);
    CHECK(std::abs(c.fit.p + 2.5) < 0.1);
    CHECK(c.consistent);
  }
  SUBCASE("cusp mixed derivative") {
    const double R = 0.9;
    const auto w = extract_remainder(log_lambda(1.0, R), 1.0);
    const auto c = remainder_rate(w, disk(R), 1, 1);
    CHECK(std::abs(c.fit.p + 2.0) < 0.05);
    CHECK(std::abs(c.fit.q + 3.0) < 0.3);
    CHECK(c.sharp);
  }
  SUBCASE("all patterns of one order") {
    const auto checks = check_remainder_rates(corner, disk(), 2);
    CHECK(checks.size() == 3);
    for (const auto& c : checks) CHECK(c.consistent);
  }
  CHECK_THROWS_AS(remainder_rate(corner, disk(), 3, 3), ParameterError);
}

TEST_CASE("minda limit") {
  CHECK(std::abs(minda_limit(punctured_disk_metric()).value - 0.5) < 1e-3);
  for_all(6, 44, [](Gen& g, int) {
    CHECK(std::abs(minda_limit(lambda(1.0, g.uniform(0.3, 5.0))).value - 0.5) < 1e-3);
    CHECK(std::abs(minda_limit(lambda(g.uniform(-1.0, 0.95), g.uniform(0.3, 5.0))).value) < 1e-3);
  });
  CHECK(std::abs(minda_limit(lambda(0.6)).value) < 1e-3);
  // Curvature -1 scales the limit to 1.
  CHECK(std::abs(minda_limit(punctured_disk_metric().scaled(2.0)).value - 1.0) < 2e-3);
}

TEST_CASE("cusp derivative limits") {
  const auto lim = cusp_derivative_limits(punctured_disk_metric(), -4.0);
  CHECK(lim.expected_first == -0.25);
  CHECK(lim.expected_second == 0.375);
  CHECK(lim.expected_mixed == 0.125);
  CHECK(lim.first.value == doctest::Approx(-0.25).epsilon(0.02));
  CHECK(lim.second.value == doctest::Approx(0.375).epsilon(0.02));
  CHECK(lim.mixed.value == doctest::Approx(0.125).epsilon(0.02));
  CHECK_THROWS_AS(cusp_derivative_limits(punctured_disk_metric(), 0.0), ParameterError);
}

TEST_CASE("u derivative limits") {
  SUBCASE("pure normal form is exact") {
    const auto rep = u_deriv_limits([](ComplexPoint z) { return -0.5 * std::log(z.abs()); }, disk(), 0.5, 0, 2);
    CHECK(rep.expected == 0.25);
    CHECK(rep.limit.value == doctest::Approx(0.25).epsilon(1e-4));
  }
  SUBCASE("pure patterns of closed forms") {
    for (double alpha : {0.25, 0.5, 1.0}) {
      for (int n = 1; n <= 4; ++n) {
        CAPTURE(alpha);
        CAPTURE(n);
        const double expected = 0.5 * alpha * std::pow(-1.0, n) * factorial(n - 1);
        const auto rep = u_deriv_limits(log_lambda(alpha), disk(), alpha, 0, n);
        CHECK(rep.expected == doctest::Approx(expected));
        CHECK(std::abs(rep.limit.value - expected) <= 0.02 * std::abs(expected));
      }
    }
  }
  SUBCASE("mixed pattern vanishes") {
    const auto rep = u_deriv_limits(log_lambda(0.5), disk(), 0.5, 1, 1);
    CHECK(rep.expected == 0.0);
    CHECK(std::abs(rep.limit.value) < 1e-3);
    CHECK_FALSE(rep.rescaled.has_value());
  }
  SUBCASE("rescaled cusp mixed limit") {
    const auto rep = u_deriv_limits(log_lambda(1.0), disk(), 1.0, 1, 1);
    REQUIRE(rep.rescaled.has_value());
    CHECK(*rep.rescaled_expected_magnitude == 0.25);
    CHECK(rep.rescaled->value == doctest::Approx(0.25).epsilon(0.02));
  }
  CHECK_THROWS_AS(u_deriv_limits(log_lambda(0.5), disk(), 0.5, 3, 3), ParameterError);
}

TEST_CASE("l tables") {
  SUBCASE("cusp closed form") {
    const auto t = l_table(punctured_disk_metric(), CuspMode{-4.0}, 2);
    CHECK(t.size() == 6);
    auto entry = [&](int nb, int nh) {
      for (const auto& e : t) {
        if (e.n_bar == nb && e.n_hol == nh) return e;
      }
      FAIL("missing entry");
      return t.front();
    };
    CHECK(entry(0, 0).closed_form == 0.5);
    CHECK(entry(0, 1).closed_form == -0.25);
    CHECK(entry(1, 1).closed_form == 0.125);
    CHECK(std::abs(entry(0, 0).numeric.value - 0.5) < 1e-3);
    CHECK(entry(0, 1).numeric.value == doctest::Approx(-0.25).epsilon(0.02));
    for (const auto& e : t) {
      CAPTURE(e.n_bar);
      CAPTURE(e.n_hol);
      const auto mirror = entry(e.n_hol, e.n_bar);
      CHECK(std::abs(e.numeric.value - mirror.numeric.value) <=
            e.numeric.extrapolation_error + mirror.numeric.extrapolation_error + 1e-9);
      CHECK(e.numeric.value == doctest::Approx(e.closed_form).epsilon(0.05));
    }
  }
  SUBCASE("cusp recurrence") {
    const auto t = l_table(punctured_disk_metric(), CuspMode{-4.0}, 4);
    for (const auto& e : t) {
      if (e.n_hol == 0) continue;
      for (const auto& prev : t) {
        if (prev.n_bar == e.n_bar && prev.n_hol == e.n_hol - 1) {
          CHECK(std::abs(e.n_hol * e.closed_form - (-0.5 - e.n_hol + 1) * prev.closed_form) < 1e-14);
        }
      }
    }
  }
  SUBCASE("corner") {
    const auto t = l_table(lambda(0.5), CornerMode{0.5, 0.5}, 1);
    for (const auto& e : t) {
      if (e.n_bar == 0 && e.n_hol == 1) {
        CHECK(e.closed_form == doctest::Approx(-0.125));
        CHECK(e.numeric.value == doctest::Approx(-0.125).epsilon(0.05));
      }
    }
    const auto computed = l_table(lambda(0.5), CornerMode{0.5, std::nullopt}, 0);
    CHECK(computed.front().closed_form == doctest::Approx(0.5).epsilon(0.01));
  }
  CHECK_THROWS_AS(l_table(punctured_disk_metric(), CuspMode{-4.0}, 5), ParameterError);
  CHECK_THROWS_AS(l_table(punctured_disk_metric(), CuspMode{1.0}, 1), ParameterError);
}

TEST_CASE("sk_limsup") {
  CHECK(sk_limsup(lambda(0.4), 0.4).value == doctest::Approx(0.6).epsilon(0.01 / 0.6));
  CHECK(sk_limsup(lambda(0.4).scaled(0.5), 0.4).value == doctest::Approx(0.3).epsilon(0.01 / 0.3));
  CHECK(sk_limsup(constant_metric(1.0, disk()), 0.0).value == doctest::Approx(1.0));
  for_all(10, 45, [](Gen& g, int) {
    const double alpha = g.uniform(-1.0, 0.9), R = g.uniform(0.5, 2.0);
    // limsup of |z|^alpha lambda_{alpha,R} = (1-alpha) R^{alpha-1}.
    CHECK(sk_limsup(lambda(alpha, R), alpha).value ==
          doctest::Approx((1.0 - alpha) * std::pow(R, alpha - 1.0)).epsilon(0.01));
  });
  CHECK_THROWS_AS(sk_limsup(punctured_disk_metric(), 1.0), ParameterError);
}
