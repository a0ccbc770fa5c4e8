#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "conformal/complex_point.hpp"
#include "conformal/metrics.hpp"
#include "conformal/multi_index.hpp"

namespace conformal {

struct DerivativeEstimate {
  double value = 0.0;
  /// Difference between the two most refined Richardson entries.
  double error_estimate = 0.0;
  /// Set when |J| >= 5 and the relative step is below 1e-3 (cancellation).
  bool accuracy_warning = false;
};

struct WirtingerEstimate {
  std::complex<double> value;
  double error_estimate = 0.0;
  bool accuracy_warning = false;
};

/// Number of step halvings combined by Richardson refinement.
inline constexpr int kRichardsonLevels = 3;

/// Central finite-difference estimate of d1^j1 d2^j2 field at z with base
/// step h, refined over h, h/2, h/4. When a domain is given the coarsest
/// stencil must fit inside it (DomainError otherwise). Supports |J| <= 6.
DerivativeEstimate field_deriv(const ScalarField& field, MultiIndex J, ComplexPoint z, double h,
                               const std::optional<PuncturedDisk>& domain = std::nullopt);

/// All real partials of total order n at z, indexed by j2 = 0..n. Shares one
/// sample lattice per step level.
std::vector<DerivativeEstimate> field_partials(const ScalarField& field, int n, ComplexPoint z,
                                               double h,
                                               const std::optional<PuncturedDisk>& domain = std::nullopt);

/// dbar^n_bar d^n_hol field at z with d = (d1 - i d2)/2, dbar = (d1 + i d2)/2.
WirtingerEstimate wirtinger_deriv(const ScalarField& field, int n_bar, int n_hol, ComplexPoint z,
                                  double h,
                                  const std::optional<PuncturedDisk>& domain = std::nullopt);

/// Default relative step for derivatives of total order n (multiplied by the
/// distance to the puncture).
double relative_step(int order);

/// relative_step(order) times the local scale of the domain at z.
double default_step(ComplexPoint z, int order, const PuncturedDisk& domain);

}  // namespace conformal
