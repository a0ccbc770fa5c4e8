#include <cmath>
#include <numeric>

#include "conformal/errors.hpp"
#include "conformal/grid.hpp"
#include "conformal/metrics.hpp"
#include "conformal/solver.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace conformal;
using testing::for_all;
using testing::Gen;

namespace {

double sup_error(const Solution& sol, const ScalarField& oracle) {
  double err = 0.0;
  for (int i = 0; i < sol.grid.nr(); ++i) {
    for (int j = 0; j < sol.grid.ntheta(); ++j) {
      err = std::max(err, std::abs(sol.u[sol.grid.index(i, j)] - oracle(sol.grid.point(i, j))));
    }
  }
  return err;
}

ScalarField log_lambda(double alpha, double R) {
  return [alpha, R](ComplexPoint z) { return testing::log_lambda_oracle(alpha, R, z.abs()); };
}

Solution manufactured(double alpha, int nr, int nt, double tol) {
  const auto grid = AnnularGrid::build(1e-3, 0.5, nr, nt);
  SolverConfig cfg;
  cfg.tol = tol;
  return solve_curvature(CurvatureField::constant(-4.0), DirichletData::from_field(log_lambda(alpha, 1.0)), grid, cfg);
}

// max over interior nodes of |apply_laplacian(u) - exact|.
double laplacian_error(const AnnularGrid& g, const ScalarField& u, const ScalarField& exact, int order) {
  std::vector<double> values(g.size());
  for (int i = 0; i < g.nr(); ++i) {
    for (int j = 0; j < g.ntheta(); ++j) values[g.index(i, j)] = u(g.point(i, j));
  }
  const auto lap = apply_laplacian(g, values, order);
  double err = 0.0;
  for (int i = 1; i + 1 < g.nr(); ++i) {
    for (int j = 0; j < g.ntheta(); ++j) err = std::max(err, std::abs(lap[g.index(i, j)] - exact(g.point(i, j))));
  }
  return err;
}

}  // namespace

TEST_CASE("annular grid") {
  const auto g = AnnularGrid::build(1e-3, 0.5, 9, 8);
  CHECK(g.radius(0) == 1e-3);
  CHECK(g.radius(8) == 0.5);
  CHECK(g.radius(4) == doctest::Approx(std::sqrt(1e-3 * 0.5)).epsilon(1e-13));
  CHECK(g.size() == 72);
  CHECK(g.index(2, 3) == 19);
  CHECK(g.angle(2) == doctest::Approx(M_PI / 2));
  CHECK_THROWS_AS(AnnularGrid::build(1e-3, 0.5, 4, 8), ParameterError);
  CHECK_THROWS_AS(AnnularGrid::build(0.1, 0.1, 16, 8), ParameterError);
  CHECK_THROWS_AS(AnnularGrid::build(0.0, 0.1, 16, 8), ParameterError);
  CHECK_THROWS_AS(AnnularGrid::build(0.1, 0.2, 16, 4), ParameterError);
}

TEST_CASE("grid field interpolation") {
  const auto g = AnnularGrid::build(0.01, 1.0, 64, 64);
  const auto field = GridField::sample(g, [](ComplexPoint z) { return std::log(z.abs()) + z.re(); });
  for_all(50, 31, [&](Gen& gen, int) {
    const auto z = gen.log_point_in_annulus(0.0101, 0.99);
    CHECK(std::abs(field.interpolate(z) - (std::log(z.abs()) + z.re())) < 2e-3);
  });
  // Exact in log r along a ray.
  const auto z = ComplexPoint::polar(0.1, g.angle(5));
  const auto logr = GridField::sample(g, [](ComplexPoint w) { return std::log(w.abs()); });
  CHECK(logr.interpolate(z) == doctest::Approx(std::log(0.1)).epsilon(1e-12));
  CHECK_THROWS_AS(field.interpolate({0.001, 0.0}), DomainError);
  CHECK(field.ring_max(0) >= field.ring_mean(0));
}

TEST_CASE("discrete Laplacian") {
  const auto g = AnnularGrid::build(0.1, 1.0, 64, 128);
  const ScalarField r2 = [](ComplexPoint z) { return z.abs() * z.abs(); };
  const ScalarField four = [](ComplexPoint) { return 4.0; };
  const ScalarField zero = [](ComplexPoint) { return 0.0; };
  const ScalarField logr = [](ComplexPoint z) { return std::log(z.abs()); };
  const ScalarField cubic = [](ComplexPoint z) { return std::pow(z.abs(), 3) * std::cos(3 * z.arg()); };
  for (int order : {2, 4}) {
    CAPTURE(order);
    CHECK(laplacian_error(g, r2, four, order) < 1e-2);
    CHECK(laplacian_error(g, logr, zero, order) < 1e-9);
    CHECK(laplacian_error(g, cubic, zero, order) < 5e-2);
  }
  SUBCASE("second order in theta, chosen order in log r") {
    // Radial-only field isolates the radial stencil.
    const auto coarse = AnnularGrid::build(0.1, 1.0, 32, 8);
    const auto fine = AnnularGrid::build(0.1, 1.0, 63, 8);
    const double e2c = laplacian_error(coarse, r2, four, 2), e2f = laplacian_error(fine, r2, four, 2);
    const double e4c = laplacian_error(coarse, r2, four, 4), e4f = laplacian_error(fine, r2, four, 4);
    CHECK(e2c / e2f > 3.5);
    CHECK(e4c / e4f > 12.0);
    // Angular-only error: u = cos(3 theta) with r fixed through r^3 cos 3 theta at many angles.
    const auto a1 = AnnularGrid::build(0.5, 1.0, 16, 32);
    const auto a2 = AnnularGrid::build(0.5, 1.0, 16, 64);
    const ScalarField ang = [](ComplexPoint z) { return std::cos(3 * z.arg()); };
    const ScalarField ang_lap = [](ComplexPoint z) { return -9.0 * std::cos(3 * z.arg()) / (z.abs() * z.abs()); };
    CHECK(laplacian_error(a1, ang, ang_lap, 4) / laplacian_error(a2, ang, ang_lap, 4) > 3.5);
  }
  const auto lap = apply_laplacian(g, std::vector<double>(g.size(), 1.0));
  CHECK(std::isnan(lap[g.index(0, 0)]));
  CHECK(std::isnan(lap[g.index(g.nr() - 1, 3)]));
  CHECK_THROWS_AS(apply_laplacian(g, std::vector<double>(3, 0.0)), ParameterError);
  CHECK_THROWS_AS(apply_laplacian(g, std::vector<double>(g.size(), 0.0), 3), ParameterError);
}

TEST_CASE("linear problem is solved in one Newton step") {
  const auto grid = AnnularGrid::build(0.1, 1.0, 32, 32);
  const ScalarField harmonic = [](ComplexPoint z) { return std::log(z.abs()) + z.re(); };
  const auto sol = solve_curvature(CurvatureField::constant(0.0), DirichletData::from_field(harmonic), grid,
                                   SolverConfig{1e-10, 50, 1.0, 20, 4, std::nullopt});
  CHECK(sol.newton_iters <= 1);
  CHECK(sol.residual_norm < 1e-10);
}

TEST_CASE("manufactured solution log lambda_{1/2,1}") {
  const auto sol = manufactured(0.5, 128, 64, 1e-5);
  CHECK(sol.residual_norm < 1e-5);
  CHECK(sup_error(sol, log_lambda(0.5, 1.0)) <= 1e-4);
  CHECK(sol.history.size() == static_cast<std::size_t>(sol.newton_iters) + 1);
}

TEST_CASE("refinement study") {
  for (double alpha : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    CAPTURE(alpha);
    const double tol = alpha == 1.0 ? 5e-5 : 1e-5;
    const double e1 = sup_error(manufactured(alpha, 64, 32, tol), log_lambda(alpha, 1.0));
    const double e2 = sup_error(manufactured(alpha, 128, 64, tol), log_lambda(alpha, 1.0));
    CHECK(e1 / e2 >= 3.5);
  }
}

TEST_CASE("variable curvature") {
  const auto grid = AnnularGrid::build(0.05, 0.5, 48, 48);
  CurvatureField kappa;
  kappa.eval = [](ComplexPoint z) { return -4.0 * (1.0 + z.abs()); };
  kappa.kappa0 = -4.0;
  const ScalarField zero = [](ComplexPoint) { return 0.0; };
  SolverConfig cfg;
  cfg.tol = 1e-10;
  const auto a = solve_curvature(kappa, DirichletData::from_field(zero), grid, cfg);
  CHECK(a.residual_norm < 1e-10);
  SUBCASE("unique solution from another starting point") {
    auto start = std::vector<double>(grid.size());
    for (std::size_t k = 0; k < start.size(); ++k) start[k] = -0.5 + 0.1 * std::sin(static_cast<double>(k));
    cfg.initial_guess = start;
    const auto b = solve_curvature(kappa, DirichletData::from_field(zero), grid, cfg);
    double diff = 0.0;
    for (std::size_t k = 0; k < a.u.size(); ++k) diff = std::max(diff, std::abs(a.u[k] - b.u[k]));
    CHECK(diff < 1e-9);
  }
  SUBCASE("subharmonic") {
    const auto lap = apply_laplacian(grid, a.u, 4);
    for (int i = 1; i + 1 < grid.nr(); ++i) {
      for (int j = 0; j < grid.ntheta(); ++j) CHECK(lap[grid.index(i, j)] > 0.0);
    }
  }
}

TEST_CASE("residual contract") {
  for_all(6, 32, [](Gen& g, int) {
    const double kappa = -g.uniform(1.0, 8.0);
    const double inner = g.uniform(-1.0, 1.0), outer = g.uniform(-1.0, 1.0);
    const auto grid = AnnularGrid::build(g.uniform(0.01, 0.2), g.uniform(0.5, 1.0), 24, 16);
    SolverConfig cfg;
    cfg.tol = 1e-9;
    cfg.radial_order = g.integer(0, 1) == 0 ? 2 : 4;
    const auto sol = solve_curvature(CurvatureField::constant(kappa),
                                     {[inner](ComplexPoint) { return inner; }, [outer](ComplexPoint) { return outer; }},
                                     grid, cfg);
    CHECK(sol.residual_norm < cfg.tol);
    for (int j = 0; j < grid.ntheta(); ++j) {
      CHECK(sol.u[grid.index(0, j)] == inner);
      CHECK(sol.u[grid.index(grid.nr() - 1, j)] == outer);
    }
  });
}

TEST_CASE("cusp diagnostic stays bounded") {
  // |(-kappa e^{2w} - 1) log(1/|z|)| along shrinking rings of a cusp solution.
  const double R = 0.9;
  const auto grid = AnnularGrid::build(1e-3, 0.5, 128, 32);
  SolverConfig cfg;
  cfg.tol = 5e-5;
  const auto sol =
      solve_curvature(CurvatureField::constant(-4.0), DirichletData::from_field(log_lambda(1.0, R)), grid, cfg);
  const auto w = extract_remainder(sol, 1.0);
  double sup = 0.0;
  for (int i = 0; i < grid.nr(); ++i) {
    const double L = -std::log(grid.radius(i));
    sup = std::max(sup, std::abs((4.0 * std::exp(2.0 * w.values.ring_max(i)) - 1.0) * L));
  }
  // Closed form: (L^2/(L + log R)^2 - 1) L -> -2 log R.
  CHECK(sup < 2.0 * std::abs(std::log(R)) + 0.1);
}

TEST_CASE("solver failures") {
  const auto grid = AnnularGrid::build(0.1, 1.0, 16, 16);
  const auto data = DirichletData::from_field([](ComplexPoint) { return 0.0; });
  CHECK_THROWS_AS(solve_curvature(CurvatureField::constant(1.0), data, grid), DomainError);
  CHECK_THROWS_AS(solve_curvature(CurvatureField::constant(-4.0), data, grid, SolverConfig{1e-8, 0}), ParameterError);
  SolverConfig tight;
  tight.tol = 1e-30;
  tight.max_iter = 2;
  try {
    solve_curvature(CurvatureField::constant(-4.0), data, grid, tight);
    FAIL("expected a convergence error");
  } catch (const ConvergenceError& e) {
    CHECK(!e.trace().empty());
  }
}

TEST_CASE("remainder functions") {
  SUBCASE("corner closed form") {
    const auto v = extract_remainder(log_lambda(0.5, 1.0), 0.5);
    CHECK(v.kind == SingularityKind::corner);
    for_all(20, 33, [&](Gen& g, int) {
      const auto z = g.log_point_in_annulus(1e-6, 0.99);
      CHECK(v.eval(z) == doctest::Approx(-std::log(2.0 * (1.0 - z.abs()))).epsilon(1e-12));
    });
    CHECK(v.eval({1e-12, 0.0}) == doctest::Approx(std::log(0.5)).epsilon(1e-10));
  }
  SUBCASE("cusp closed form") {
    const double R = 0.9;
    const auto w = extract_remainder(log_lambda(1.0, R), 1.0);
    CHECK(w.kind == SingularityKind::cusp);
    for_all(20, 34, [&](Gen& g, int) {
      const auto z = g.log_point_in_annulus(1e-8, 0.85);
      const double L = -std::log(z.abs());
      CHECK(w.eval(z) == doctest::Approx(-std::log(2.0) + std::log(L / (L + std::log(R)))).epsilon(1e-12));
    });
  }
  SUBCASE("pure normal form has zero remainder") {
    const auto v = extract_remainder([](ComplexPoint z) { return -0.3 * std::log(z.abs()); }, 0.3);
    CHECK(std::abs(v.eval({0.2, 0.1})) < 1e-15);
  }
  SUBCASE("synthesis inverts extraction") {
    for_all(30, 35, [](Gen& g, int) {
      const double alpha = g.integer(0, 3) == 0 ? 1.0 : g.uniform(-1.0, 0.99);
      const auto rem = extract_remainder(log_lambda(alpha, 1.0), alpha);
      const auto u = synthesize_from_remainder(rem);
      const auto z = g.log_point_in_annulus(1e-6, 0.9);
      CHECK(u(z) == doctest::Approx(testing::log_lambda_oracle(alpha, 1.0, z.abs())).epsilon(1e-12));
    });
  }
  SUBCASE("grid remainder matches the closed form") {
    const auto grid = AnnularGrid::build(1e-3, 0.5, 16, 8);
    const auto u = GridField::sample(grid, log_lambda(0.5, 1.0));
    const auto v = extract_remainder(u, 0.5);
    for (int i = 0; i < grid.nr(); ++i) {
      CHECK(v.values.at(i, 0) == doctest::Approx(-std::log(2.0 * (1.0 - grid.radius(i)))).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(singularity_kind(1.2), ParameterError);
  CHECK(singularity_kind(1.0) == SingularityKind::cusp);
  CHECK_THROWS_AS(normal_form_offset(1.0, {1.5, 0.0}), DomainError);
}
