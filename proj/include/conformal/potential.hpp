#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "conformal/complex_point.hpp"
#include "conformal/grid.hpp"
#include "conformal/multi_index.hpp"

namespace conformal {

/// Hoelder smoothness tag C^{n,nu}.
struct HoelderTag {
  int n = 0;
  double nu = 0.0;
};

using DerivativeMap = std::function<double(MultiIndex, ComplexPoint)>;

/// Density f of a logarithmic potential, extended by zero outside D_r.
struct SourceField {
  ScalarField eval;
  std::optional<DerivativeMap> derivs;
  double support_radius = 1.0;
  std::optional<HoelderTag> hoelder;
  /// Points where f is unbounded or non-smooth; used as quadrature breakpoints.
  std::vector<ComplexPoint> singular_points;

  /// f(z) on the closed support disk, 0 outside.
  double value(ComplexPoint z) const;
  /// d^a f(z). Order 0 falls back to eval; higher orders need derivs
  /// (SmoothnessError otherwise).
  double derivative(MultiIndex a, ComplexPoint z) const;

  static SourceField constant(double c, double radius);
};

struct QuadratureConfig {
  double abs_tol = 1e-8;
  int max_intervals = 400;
};

struct PotentialResult {
  double value = 0.0;
  double quadrature_error_estimate = 0.0;
};

/// d^J_z log|z - zeta|; |J| = 0 gives log|z - zeta|.
double log_kernel_deriv(MultiIndex J, ComplexPoint z, ComplexPoint zeta);

/// P_n[f](z, zeta) = sum_{|a|<=n} (zeta - z)^a d^a f(z) / a!.
double taylor_poly(const SourceField& f, int n, ComplexPoint z, ComplexPoint zeta);

/// omega(z) = (1/2pi) int_{D_r} log|z - zeta| f(zeta) dA.
PotentialResult log_potential(const SourceField& f, ComplexPoint z, const QuadratureConfig& cfg = {});

/// d^J omega(z) for z inside D_r. boundary_radius defaults to 2r and must
/// exceed r; it is unused for |J| <= 1.
PotentialResult potential_deriv(const SourceField& f, MultiIndex J, ComplexPoint z,
                                std::optional<double> boundary_radius = std::nullopt,
                                const QuadratureConfig& cfg = {});

/// int_{|zeta|=radius} d^J L(z - zeta) N_k(zeta) |d zeta| with N the outward
/// unit normal and k in {1, 2}. z must lie off the circle.
PotentialResult boundary_normal_integral(MultiIndex J, int normal_component, ComplexPoint z, double radius,
                                         double abs_tol = 1e-10);

struct RieszConfig {
  QuadratureConfig quadrature;
  double mean_value_tolerance = 1e-5;
  /// Largest admissible slope of the ring maximum of u against log(1/r).
  double growth_threshold = 0.05;
  int growth_rings = 4;
};

struct RieszDecomposition {
  GridField h;
  GridField omega;
  /// max_i |mean of h on ring i - mean on the innermost ring|.
  double mean_value_residual = 0.0;
  double growth_slope = 0.0;
  double max_quadrature_error = 0.0;
  bool harmonic = false;
};

/// Splits u = h + omega with omega the potential of laplacian_u. Throws
/// HypothesisError when u grows like log(1/|z|) on the inner rings.
RieszDecomposition riesz_decompose(const GridField& u, const SourceField& laplacian_u,
                                   const RieszConfig& cfg = {});

}  // namespace conformal
