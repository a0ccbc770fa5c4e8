#include "conformal/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <tuple>

#include "conformal/errors.hpp"

namespace conformal {

namespace {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Vector = Eigen::VectorXd;

/// Unknowns are the interior rings i = 1..nr-2; k = (i-1)*ntheta + j.
struct InteriorLayout {
  int nr;
  int nt;
  int size() const { return (nr - 2) * nt; }
  int unknown(int i, int j) const { return (i - 1) * nt + j; }
};

struct Tap {
  int ring;
  double weight;
};

/// Weights of D_ss (unscaled by 1/ds^2) for interior ring i.
std::vector<Tap> radial_taps(int i, int nr, int order) {
  if (order == 2) return {{i - 1, 1.0}, {i, -2.0}, {i + 1, 1.0}};
  if (i == 1) {
    return {{0, 10.0 / 12}, {1, -15.0 / 12}, {2, -4.0 / 12}, {3, 14.0 / 12}, {4, -6.0 / 12}, {5, 1.0 / 12}};
  }
  if (i == nr - 2) {
    const int e = nr - 1;
    return {{e, 10.0 / 12}, {e - 1, -15.0 / 12}, {e - 2, -4.0 / 12},
            {e - 3, 14.0 / 12}, {e - 4, -6.0 / 12}, {e - 5, 1.0 / 12}};
  }
  return {{i - 2, -1.0 / 12}, {i - 1, 4.0 / 3}, {i, -5.0 / 2}, {i + 1, 4.0 / 3}, {i + 2, -1.0 / 12}};
}

void check_order(int order) {
  if (order != 2 && order != 4) throw ParameterError("radial_order must be 2 or 4, got " + std::to_string(order));
}

/// -(D_ss + D_tt) on the interior unknowns. Couplings to the Dirichlet rings
/// are returned separately as (unknown, boundary node, weight).
struct Operator {
  SparseMatrix A;
  std::vector<std::tuple<int, std::size_t, double>> boundary;
};

Operator negative_laplacian_in_s(const AnnularGrid& grid, int order) {
  const InteriorLayout lay{grid.nr(), grid.ntheta()};
  const double cs = 1.0 / (grid.log_step() * grid.log_step());
  const double ct = 1.0 / (grid.angle_step() * grid.angle_step());
  const int nt = grid.ntheta();
  Operator op;
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(lay.size()) * 8);
  for (int i = 1; i <= grid.nr() - 2; ++i) {
    const auto taps = radial_taps(i, grid.nr(), order);
    for (int j = 0; j < nt; ++j) {
      const int k = lay.unknown(i, j);
      for (const auto& t : taps) {
        if (t.ring == 0 || t.ring == grid.nr() - 1) {
          op.boundary.emplace_back(k, grid.index(t.ring, j), -cs * t.weight);
        } else {
          trip.emplace_back(k, lay.unknown(t.ring, j), -cs * t.weight);
        }
      }
      trip.emplace_back(k, k, 2.0 * ct);
      trip.emplace_back(k, lay.unknown(i, (j + 1) % nt), -ct);
      trip.emplace_back(k, lay.unknown(i, (j + nt - 1) % nt), -ct);
    }
  }
  op.A.resize(lay.size(), lay.size());
  op.A.setFromTriplets(trip.begin(), trip.end());
  return op;
}

double max_abs_interior(const AnnularGrid& grid, const std::vector<double>& v) {
  double m = 0.0;
  for (int i = 1; i <= grid.nr() - 2; ++i) {
    for (int j = 0; j < grid.ntheta(); ++j) m = std::max(m, std::abs(v[grid.index(i, j)]));
  }
  return m;
}

std::vector<double> residual(const AnnularGrid& grid, const std::vector<double>& u,
                             const std::vector<double>& kappa, int order) {
  auto F = apply_laplacian(grid, u, order);
  for (int i = 1; i <= grid.nr() - 2; ++i) {
    for (int j = 0; j < grid.ntheta(); ++j) {
      const auto k = grid.index(i, j);
      F[k] += kappa[k] * std::exp(2.0 * u[k]);
    }
  }
  return F;
}

}  // namespace

CurvatureField CurvatureField::constant(double kappa) {
  CurvatureField out;
  out.eval = [kappa](ComplexPoint) { return kappa; };
  out.kappa0 = kappa;
  out.hoelder = HoelderTag{std::numeric_limits<int>::max(), 1.0};
  return out;
}

DirichletData DirichletData::from_field(const ScalarField& u) { return {u, u}; }

std::vector<double> apply_laplacian(const AnnularGrid& grid, const std::vector<double>& u, int radial_order) {
  check_order(radial_order);
  if (u.size() != grid.size()) {
    throw ParameterError("apply_laplacian: expected " + std::to_string(grid.size()) + " nodal values, got " +
                         std::to_string(u.size()));
  }
  const double cs = 1.0 / (grid.log_step() * grid.log_step());
  const double ct = 1.0 / (grid.angle_step() * grid.angle_step());
  const int nt = grid.ntheta();
  std::vector<double> out(u.size(), std::numeric_limits<double>::quiet_NaN());
  for (int i = 1; i <= grid.nr() - 2; ++i) {
    const double r = grid.radius(i);
    const auto taps = radial_taps(i, grid.nr(), radial_order);
    for (int j = 0; j < nt; ++j) {
      const double c = u[grid.index(i, j)];
      double dss = 0.0;
      for (const auto& t : taps) dss += t.weight * u[grid.index(t.ring, j)];
      dss *= cs;
      const double dtt = (u[grid.index(i, (j + 1) % nt)] - 2.0 * c + u[grid.index(i, (j + nt - 1) % nt)]) * ct;
      out[grid.index(i, j)] = (dss + dtt) / (r * r);
    }
  }
  return out;
}

Solution solve_curvature(const CurvatureField& kappa, const DirichletData& boundary, const AnnularGrid& grid,
                         const SolverConfig& cfg) {
  if (!(cfg.tol > 0.0) || cfg.max_iter < 1 || !(cfg.damping > 0.0 && cfg.damping <= 1.0) || cfg.max_backtracks < 0) {
    throw ParameterError("solve_curvature: need tol > 0, max_iter >= 1, damping in (0, 1], max_backtracks >= 0");
  }
  const InteriorLayout lay{grid.nr(), grid.ntheta()};
  const int nt = grid.ntheta();

  std::vector<double> kap(grid.size());
  for (int i = 0; i < grid.nr(); ++i) {
    for (int j = 0; j < nt; ++j) {
      const double k = kappa.eval(grid.point(i, j));
      if (!std::isfinite(k) || k > 0.0) {
        std::ostringstream os;
        os << "solve_curvature: kappa must be finite and <= 0 on the grid; kappa(" << grid.point(i, j).re() << ", "
           << grid.point(i, j).im() << ") = " << k;
        throw DomainError(os.str());
      }
      kap[grid.index(i, j)] = k;
    }
  }

  std::vector<double> u(grid.size(), 0.0);
  for (int j = 0; j < nt; ++j) {
    const double a = boundary.inner(grid.point(0, j));
    const double b = boundary.outer(grid.point(grid.nr() - 1, j));
    if (!std::isfinite(a) || !std::isfinite(b)) throw DomainError("solve_curvature: boundary data must be finite");
    u[grid.index(0, j)] = a;
    u[grid.index(grid.nr() - 1, j)] = b;
  }

  check_order(cfg.radial_order);
  const Operator op = negative_laplacian_in_s(grid, cfg.radial_order);
  const SparseMatrix& L = op.A;

  if (cfg.initial_guess) {
    const auto& g = *cfg.initial_guess;
    if (g.size() == grid.size()) {
      for (int i = 1; i <= grid.nr() - 2; ++i) {
        for (int j = 0; j < nt; ++j) u[grid.index(i, j)] = g[grid.index(i, j)];
      }
    } else if (g.size() == static_cast<std::size_t>(lay.size())) {
      for (int i = 1; i <= grid.nr() - 2; ++i) {
        for (int j = 0; j < nt; ++j) u[grid.index(i, j)] = g[static_cast<std::size_t>(lay.unknown(i, j))];
      }
    } else {
      throw ParameterError("solve_curvature: initial guess has the wrong size");
    }
  } else {
    // Harmonic extension: -(D_ss + D_tt) u = Dirichlet coupling.
    Vector rhs = Vector::Zero(lay.size());
    for (const auto& [k, node, w] : op.boundary) rhs[k] -= w * u[node];
    Eigen::SparseLU<SparseMatrix> harmonic(L);
    if (harmonic.info() != Eigen::Success) throw ConvergenceError("solve_curvature: harmonic solve failed", {});
    const Vector h = harmonic.solve(rhs);
    for (int i = 1; i <= grid.nr() - 2; ++i) {
      for (int j = 0; j < nt; ++j) u[grid.index(i, j)] = h[lay.unknown(i, j)];
    }
  }

  Solution sol{grid, u, 0.0, 0, {}};
  auto F = residual(grid, sol.u, kap, cfg.radial_order);
  double norm = max_abs_interior(grid, F);
  sol.history.push_back(norm);

  Eigen::SparseLU<SparseMatrix> lu;
  lu.analyzePattern(L);
  SparseMatrix M = L;
  Vector rhs(lay.size());
  std::vector<double> trial(sol.u);

  while (norm >= cfg.tol) {
    if (sol.newton_iters >= cfg.max_iter) {
      std::ostringstream os;
      os << "solve_curvature: no convergence after " << cfg.max_iter << " Newton steps; residual " << norm;
      throw ConvergenceError(os.str(), sol.history);
    }
    // M = -(D_ss + D_tt) - diag(2 kappa e^{2u} r^2); the diagonal shift is
    // nonnegative for kappa <= 0, so M stays an M-matrix perturbation.
    M = L;
    for (int i = 1; i <= grid.nr() - 2; ++i) {
      const double r2 = grid.radius(i) * grid.radius(i);
      for (int j = 0; j < nt; ++j) {
        const auto k = grid.index(i, j);
        const int m = lay.unknown(i, j);
        M.coeffRef(m, m) -= 2.0 * kap[k] * std::exp(2.0 * sol.u[k]) * r2;
        rhs[m] = r2 * F[k];
      }
    }
    lu.factorize(M);
    if (lu.info() != Eigen::Success) {
      throw ConvergenceError("solve_curvature: singular Newton linearization", sol.history);
    }
    const Vector delta = lu.solve(rhs);

    double step = cfg.damping;
    bool accepted = false;
    std::vector<double> trial_F;
    double trial_norm = norm;
    for (int bt = 0; bt <= cfg.max_backtracks; ++bt) {
      trial = sol.u;
      for (int i = 1; i <= grid.nr() - 2; ++i) {
        for (int j = 0; j < nt; ++j) trial[grid.index(i, j)] += step * delta[lay.unknown(i, j)];
      }
      trial_F = residual(grid, trial, kap, cfg.radial_order);
      trial_norm = max_abs_interior(grid, trial_F);
      if (std::isfinite(trial_norm) && trial_norm <= (1.0 - 1e-4 * step) * norm) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      std::ostringstream os;
      os << "solve_curvature: residual stagnated at " << norm << " (tol " << cfg.tol << ") after "
         << sol.newton_iters << " Newton steps";
      throw ConvergenceError(os.str(), sol.history);
    }
    sol.u.swap(trial);
    F.swap(trial_F);
    norm = trial_norm;
    ++sol.newton_iters;
    sol.history.push_back(norm);
  }
  sol.residual_norm = norm;
  return sol;
}

SingularityKind singularity_kind(double alpha) {
  if (!std::isfinite(alpha) || alpha > 1.0) {
    throw ParameterError("singularity order alpha must be finite and <= 1, got " + std::to_string(alpha));
  }
  return alpha == 1.0 ? SingularityKind::cusp : SingularityKind::corner;
}

double normal_form_offset(double alpha, ComplexPoint z) {
  const double r = z.abs();
  if (!(r > 0.0)) throw SingularPointError("normal_form_offset: z = 0");
  if (singularity_kind(alpha) == SingularityKind::corner) return alpha * std::log(r);
  if (!(r < 1.0)) {
    std::ostringstream os;
    os << "normal_form_offset: log log(1/|z|) undefined at |z| = " << r;
    throw DomainError(os.str());
  }
  return std::log(r) + std::log(-std::log(r));
}

RemainderField extract_remainder(const GridField& u, double alpha) {
  RemainderField out{singularity_kind(alpha), alpha, u};
  for (int i = 0; i < u.grid.nr(); ++i) {
    for (int j = 0; j < u.grid.ntheta(); ++j) out.values.at(i, j) += normal_form_offset(alpha, u.grid.point(i, j));
  }
  return out;
}

RemainderField extract_remainder(const Solution& solution, double alpha) {
  return extract_remainder(solution.field(), alpha);
}

RemainderFunction extract_remainder(const ScalarField& u, double alpha) {
  return {singularity_kind(alpha), alpha, [u, alpha](ComplexPoint z) { return u(z) + normal_form_offset(alpha, z); }};
}

ScalarField synthesize_from_remainder(const RemainderFunction& rem) {
  return [rem](ComplexPoint z) { return rem.eval(z) - normal_form_offset(rem.alpha, z); };
}

}  // namespace conformal
