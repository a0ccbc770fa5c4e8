#pragma once

#include <optional>
#include <vector>

#include "conformal/complex_point.hpp"
#include "conformal/grid.hpp"
#include "conformal/potential.hpp"

namespace conformal {

/// Curvature kappa(z) of the equation Delta u = -kappa e^{2u}.
struct CurvatureField {
  ScalarField eval;
  /// Value (or extension) at the puncture.
  double kappa0 = -4.0;
  std::optional<HoelderTag> hoelder;

  static CurvatureField constant(double kappa);
};

/// Dirichlet data on the inner (|z| = r_min) and outer (|z| = r_max) circles.
struct DirichletData {
  ScalarField inner;
  ScalarField outer;

  static DirichletData from_field(const ScalarField& u);
};

struct SolverConfig {
  double tol = 1e-8;
  int max_iter = 50;
  /// Initial Newton step length; Armijo halves it on failure.
  double damping = 1.0;
  int max_backtracks = 20;
  /// Accuracy in s = log r of the discrete Laplacian (2 or 4).
  int radial_order = 4;
  /// Interior starting values. Defaults to the discrete harmonic extension.
  std::optional<std::vector<double>> initial_guess;
};

struct Solution {
  AnnularGrid grid;
  std::vector<double> u;
  /// max over interior nodes of |Delta_h u + kappa e^{2u}|.
  double residual_norm = 0.0;
  int newton_iters = 0;
  /// Residual norm before each Newton step and after the last one.
  std::vector<double> history;

  GridField field() const { return GridField{grid, u}; }
};

/// Laplacian (u_ss + u_tt) / r^2 in s = log r, periodic in theta, second
/// order in theta. radial_order 2 uses the 3-point stencil in s; 4 uses the
/// 5-point stencil with 6-point one-sided rows next to the boundary. The two
/// boundary rings carry no stencil and are set to NaN.
std::vector<double> apply_laplacian(const AnnularGrid& grid, const std::vector<double>& u, int radial_order = 2);

/// Damped Newton for Delta_h u + kappa e^{2u} = 0 with Dirichlet data.
/// Requires kappa <= 0 at every node. Throws ConvergenceError with the
/// residual trace when the iteration stalls or max_iter is reached.
Solution solve_curvature(const CurvatureField& kappa, const DirichletData& boundary, const AnnularGrid& grid,
                         const SolverConfig& cfg = {});

enum class SingularityKind { corner, cusp };

/// alpha log|z| (corner, alpha < 1) or log|z| + log log(1/|z|) (cusp,
/// alpha == 1). The cusp form needs |z| < 1.
double normal_form_offset(double alpha, ComplexPoint z);
SingularityKind singularity_kind(double alpha);

/// Nodewise remainder v = u + alpha log|z| or w = u + log|z| + log log(1/|z|).
struct RemainderField {
  SingularityKind kind;
  double alpha;
  GridField values;
};

RemainderField extract_remainder(const Solution& solution, double alpha);
RemainderField extract_remainder(const GridField& u, double alpha);

/// The same map applied to a closed-form u.
struct RemainderFunction {
  SingularityKind kind;
  double alpha;
  ScalarField eval;
};

RemainderFunction extract_remainder(const ScalarField& u, double alpha);

/// Inverse of extract_remainder: u = rem - normal_form_offset.
ScalarField synthesize_from_remainder(const RemainderFunction& rem);

}  // namespace conformal
