#include <cmath>
#include <complex>
#include <limits>

#include "conformal/errors.hpp"
#include "conformal/finite_difference.hpp"
#include "conformal/metrics.hpp"
#include "conformal/multi_index.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace conformal;
using testing::for_all;
using testing::Gen;

TEST_CASE("complex point rejects non-finite components") {
  CHECK_THROWS_AS(ComplexPoint(std::nan(""), 0.0), DomainError);
  CHECK_THROWS_AS(ComplexPoint(0.0, std::numeric_limits<double>::infinity()), DomainError);
  const auto z = ComplexPoint::polar(2.0, M_PI / 2);
  CHECK(z.abs() == doctest::Approx(2.0));
  CHECK(z.re() == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("hyperbolic disk density values") {
  CHECK(hyperbolic_disk_density({0.0, 0.0}) == 1.0);
  CHECK(hyperbolic_disk_density({0.5, 0.0}) == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
  CHECK(hyperbolic_disk_density({0.0, 0.9}) == doctest::Approx(1.0 / 0.19).epsilon(1e-14));
  CHECK_THROWS_AS(hyperbolic_disk_density({1.0, 0.0}), DomainError);
}

TEST_CASE("punctured disk density values") {
  CHECK(punctured_disk_density({std::exp(-1.0), 0.0}) == doctest::Approx(std::exp(1.0) / 2).epsilon(1e-15));
  CHECK(punctured_disk_density({0.0, std::exp(-2.0)}) == doctest::Approx(std::exp(2.0) / 4).epsilon(1e-15));
  CHECK_THROWS_AS(punctured_disk_density({0.0, 0.0}), DomainError);
  const LambdaAlphaRParams cusp(1.0, 1.0);
  for_all(10, 11, [&](Gen& g, int) {
    const auto z = g.point_in_annulus(1e-4, 0.99);
    CHECK(testing::rel_err(punctured_disk_density(z), lambda_alpha_R(cusp, z)) < 1e-14);
  });
}

TEST_CASE("lambda_alpha_R closed forms") {
  SUBCASE("alpha = 0 is the hyperbolic disk") {
    const LambdaAlphaRParams p(0.0, 1.0);
    for_all(50, 12, [&](Gen& g, int) {
      const auto z = g.point_in_annulus(1e-6, 0.999);
      CHECK(testing::rel_err(lambda_alpha_R(p, z), hyperbolic_disk_density(z)) < 1e-13);
    });
  }
  SUBCASE("alpha = 1/2 at t = 1/4") {
    CHECK(lambda_alpha_R(LambdaAlphaRParams(0.5, 1.0), {0.25, 0.0}) == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
  }
  SUBCASE("rational and sinh forms agree") {
    for_all(100, 13, [](Gen& g, int) {
      const double alpha = g.uniform(-2.0, 0.99);
      const double R = g.log_uniform(0.1, 10.0);
      const LambdaAlphaRParams p(alpha, R);
      const auto z = g.point_in_annulus(1e-3 * R, 0.999 * R);
      CHECK(testing::rel_err(lambda_alpha_R(p, z), lambda_alpha_R_sinh(p, z)) < 1e-13);
      CHECK(testing::rel_err(lambda_alpha_R(p, z), testing::lambda_oracle(alpha, R, z.abs())) < 1e-13);
    });
  }
  SUBCASE("sinh form is used very close to the puncture") {
    const LambdaAlphaRParams p(0.5, 1.0);
    const ComplexPoint z{1e-12, 0.0};
    CHECK(testing::rel_err(lambda_alpha_R(p, z), testing::lambda_oracle(0.5, 1.0, 1e-12)) < 1e-14);
  }
  SUBCASE("parameter validation") {
    CHECK_THROWS_AS(LambdaAlphaRParams(1.5, 1.0), ParameterError);
    CHECK_THROWS_AS(LambdaAlphaRParams(0.5, 0.0), ParameterError);
    CHECK_THROWS_AS(LambdaAlphaRParams(0.5, -1.0), ParameterError);
    CHECK_THROWS_AS(lambda_alpha_R(LambdaAlphaRParams(0.5, 1.0), {0.0, 0.0}), DomainError);
    CHECK_THROWS_AS(lambda_alpha_R(LambdaAlphaRParams(0.5, 1.0), {1.0, 0.0}), DomainError);
  }
}

TEST_CASE("lambda_alpha_R decreases in R") {
  for_all(200, 14, [](Gen& g, int) {
    const double alpha = g.uniform(-1.0, 1.0);
    const double R1 = g.uniform(0.2, 2.0);
    const double R2 = R1 * g.uniform(1.0, 3.0);
    const auto z = g.point_in_annulus(1e-4 * R1, 0.99 * R1);
    CHECK(lambda_alpha_R(LambdaAlphaRParams(alpha, R2), z) <= lambda_alpha_R(LambdaAlphaRParams(alpha, R1), z));
  });
}

TEST_CASE("metric field domain and scaling") {
  const auto m = lambda_alpha_R_metric(LambdaAlphaRParams(0.5, 1.0));
  CHECK(m.order_hint() == 0.5);
  CHECK(m.curvature_hint() == -4.0);
  CHECK_THROWS_AS(m({0.0, 0.0}), DomainError);
  CHECK_THROWS_AS(m({2.0, 0.0}), DomainError);
  const auto s = m.scaled(0.5);
  CHECK(s({0.25, 0.0}) == doctest::Approx(0.5 * m({0.25, 0.0})));
  CHECK(*s.curvature_hint() == doctest::Approx(-16.0));
  CHECK_THROWS_AS(m.scaled(0.0), ParameterError);
  const auto r = m.restricted(PuncturedDisk{{}, 0.0, 0.5, true});
  CHECK_THROWS_AS(r({0.6, 0.0}), DomainError);
  CHECK(r.log_density({0.25, 0.0}) == doctest::Approx(std::log(4.0 / 3.0)));
}

TEST_CASE("pullback density") {
  const auto m = punctured_disk_metric();
  const ComplexPoint w{0.3, -0.2};
  CHECK(pullback_density(m, w, 1.0) == m(w));
  CHECK(pullback_density(m, w, 0.0) == 0.0);
  // f(w) = exp(2 pi i w) maps the upper half-plane onto D*.
  for_all(20, 15, [&](Gen& g, int) {
    const std::complex<double> wc(g.uniform(-1.0, 1.0), g.uniform(0.05, 2.0));
    const auto fw = std::exp(std::complex<double>(0.0, 2.0 * M_PI) * wc);
    const double fprime = 2.0 * M_PI * std::abs(fw);
    const double density = pullback_density(m, ComplexPoint(fw.real(), fw.imag()), fprime);
    CHECK(testing::rel_err(density, 1.0 / (2.0 * wc.imag())) < 1e-12);
  });
}

TEST_CASE("numeric curvature") {
  SUBCASE("lambda_alpha_R has curvature -4") {
    for (double alpha : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      const auto m = lambda_alpha_R_metric(LambdaAlphaRParams(alpha, 1.0));
      CAPTURE(alpha);
      CHECK(numeric_curvature(m, {0.5, 0.0}, 1e-4) == doctest::Approx(-4.0).epsilon(1e-6 / 4));
    }
  }
  SUBCASE("random points, refined stencil") {
    for_all(200, 16, [](Gen& g, int) {
      const double alpha = g.uniform(0.0, 1.0);
      const double R = g.log_uniform(0.5, 4.0);
      const auto m = lambda_alpha_R_metric(LambdaAlphaRParams(alpha, R));
      const auto z = g.log_point_in_annulus(1e-3 * R, 0.9 * R);
      CAPTURE(alpha);
      CAPTURE(z.abs() / R);
      CHECK(std::abs(numeric_curvature(m, z, default_curvature_step(m, z, 4), 4) + 4.0) < 1e-5);
    });
  }
  SUBCASE("5-point stencil away from the puncture") {
    for_all(100, 18, [](Gen& g, int) {
      const double alpha = g.uniform(-1.0, 1.0);
      const auto m = lambda_alpha_R_metric(LambdaAlphaRParams(alpha, 1.0));
      const auto z = g.point_in_annulus(0.2, 0.8);
      CHECK(std::abs(numeric_curvature(m, z, default_curvature_step(m, z)) + 4.0) < 1e-5);
    });
  }
  SUBCASE("refinement raises the order") {
    const auto m = lambda_alpha_R_metric(LambdaAlphaRParams(0.5, 1.0));
    const ComplexPoint z{0.3, 0.1};
    const double e2 = std::abs(numeric_curvature(m, z, 1e-2) + 4.0);
    const double e2h = std::abs(numeric_curvature(m, z, 5e-3) + 4.0);
    const double e4 = std::abs(numeric_curvature(m, z, 1e-2, 4) + 4.0);
    const double e4h = std::abs(numeric_curvature(m, z, 5e-3, 4) + 4.0);
    CHECK(e2 / e2h == doctest::Approx(4.0).epsilon(0.05));
    CHECK(e4 / e4h > 12.0);
    CHECK(e4 < e2 / 100.0);
    CHECK_THROWS_AS(numeric_curvature(m, z, 1e-2, 3), ParameterError);
  }
  SUBCASE("constant density is flat") {
    const auto m = constant_metric(2.0, PuncturedDisk{{}, 0.0, 1.0, false});
    CHECK(numeric_curvature(m, {0.1, 0.2}, 1e-3) == 0.0);
  }
  SUBCASE("exp(|z|^2) at the origin") {
    const MetricField m("gauss", [](ComplexPoint z) { return std::exp(z.abs() * z.abs()); },
                        PuncturedDisk{{}, 0.0, 1.0, false});
    CHECK(numeric_curvature(m, {0.0, 0.0}, 1e-3) == doctest::Approx(-4.0).epsilon(1e-6));
  }
  SUBCASE("stencil leaving the domain") {
    const auto m = punctured_disk_metric();
    CHECK_THROWS_AS(numeric_curvature(m, {0.01, 0.0}, 0.02), DomainError);
    CHECK_THROWS_AS(numeric_curvature(m, {0.5, 0.0}, 0.0), ParameterError);
  }
}

TEST_CASE("multi-index bookkeeping") {
  CHECK(MultiIndex{2, 3}.factorial() == 12.0);
  for_all(50, 17, [](Gen& g, int) {
    const auto J = g.multi_index(1, 8);
    const auto steps = J.unit_steps();
    REQUIRE(static_cast<int>(steps.size()) == J.order());
    MultiIndex sum{};
    for (const auto& e : steps) {
      CHECK(e.order() == 1);
      sum = sum + e;
    }
    CHECK(sum == J);
    for (int tau = 1; tau < J.order(); ++tau) {
      CHECK(J.partial_sum(tau) + steps[tau] + J.tail(tau) == J);
    }
    if (J.order() >= 2) CHECK(J.tail(J.order() - 1) == MultiIndex{0, 0});
  });
  const auto all = MultiIndex::up_to(3);
  CHECK(all.size() == 10);
  CHECK(all.front() == MultiIndex{0, 0});
  CHECK(all.back() == MultiIndex{0, 3});
}

TEST_CASE("finite differences") {
  SUBCASE("quadratic is exact") {
    const ScalarField f = [](ComplexPoint z) { return z.re() * z.re(); };
    CHECK(field_deriv(f, {2, 0}, {0.3, 0.1}, 1e-2).value == doctest::Approx(2.0).epsilon(1e-8));
  }
  SUBCASE("Wirtinger derivatives of log|z|") {
    const ScalarField f = [](ComplexPoint z) { return std::log(z.abs()); };
    const auto domain = PuncturedDisk{{}, 0.0, 10.0, true};
    const ComplexPoint z{0.4, -0.3};
    const std::complex<double> zc = z.value();
    for (int n = 1; n <= 3; ++n) {
      CAPTURE(n);
      const auto est = wirtinger_deriv(f, 0, n, z, default_step(z, n, domain), domain);
      double fact = 1.0;
      for (int k = 2; k < n; ++k) fact *= k;
      const std::complex<double> expected = (n % 2 == 1 ? 1.0 : -1.0) * fact / (2.0 * std::pow(zc, n));
      CHECK(std::abs(est.value - expected) / std::abs(expected) < 1e-5);
    }
  }
  SUBCASE("harmonic field has zero Laplacian") {
    const ScalarField f = [](ComplexPoint z) { return std::real(std::pow(z.value(), 3)); };
    const ComplexPoint z{0.7, 0.2};
    const double lap = field_deriv(f, {2, 0}, z, 1e-2).value + field_deriv(f, {0, 2}, z, 1e-2).value;
    CHECK(std::abs(lap) < 1e-7);
  }
  SUBCASE("error decreases at least quadratically under step halving") {
    const ScalarField f = [](ComplexPoint z) { return std::exp(z.re()) * std::sin(z.im()); };
    const ComplexPoint z{0.2, 0.5};
    const double exact = std::exp(0.2) * std::cos(0.5);
    for (double h : {0.8, 0.4}) {
      const double e1 = std::abs(field_deriv(f, {1, 1}, z, h).value - exact);
      const double e2 = std::abs(field_deriv(f, {1, 1}, z, h / 2).value - exact);
      CAPTURE(h);
      CHECK(e1 / e2 >= 4.0);
    }
  }
  SUBCASE("partials share the order") {
    const ScalarField f = [](ComplexPoint z) { return std::exp(z.re()) * std::sin(z.im()); };
    const ComplexPoint z{0.1, 0.3};
    const auto parts = field_partials(f, 3, z, 0.1);
    REQUIRE(parts.size() == 4);
    for (int j2 = 0; j2 <= 3; ++j2) {
      CHECK(parts[j2].value == doctest::Approx(field_deriv(f, {3 - j2, j2}, z, 0.1).value).epsilon(1e-10));
    }
  }
  SUBCASE("validation") {
    const ScalarField f = [](ComplexPoint z) { return z.re(); };
    const auto domain = PuncturedDisk{{}, 0.0, 1.0, true};
    CHECK_THROWS_AS(field_deriv(f, {1, 0}, {0.01, 0.0}, 0.02, domain), DomainError);
    CHECK_THROWS_AS(field_deriv(f, {7, 0}, {0.5, 0.0}, 0.01), ParameterError);
    CHECK_THROWS_AS(field_deriv(f, {1, 0}, {0.5, 0.0}, -1.0), ParameterError);
    CHECK_THROWS_AS(relative_step(7), ParameterError);
  }
}
