#pragma once

#include <vector>

namespace conformal {

/// Pair (j1, j2) of derivative counts for the real partials d1^j1 d2^j2.
struct MultiIndex {
  int j1 = 0;
  int j2 = 0;

  constexpr int order() const noexcept { return j1 + j2; }
  double factorial() const noexcept;

  /// Decomposition J = e_1 + ... + e_n into unit steps. The order is fixed:
  /// every (1,0) step first, then every (0,1) step.
  std::vector<MultiIndex> unit_steps() const;

  /// theta_tau = e_1 + ... + e_tau.
  MultiIndex partial_sum(int tau) const;

  /// phi_tau = e_{tau+2} + ... + e_n, with phi_{n-1} = (0,0).
  MultiIndex tail(int tau) const;

  /// Every multi-index a with |a| <= n, ordered by total degree then by j2.
  static std::vector<MultiIndex> up_to(int n);

  friend constexpr MultiIndex operator+(MultiIndex a, MultiIndex b) noexcept {
    return {a.j1 + b.j1, a.j2 + b.j2};
  }
  friend constexpr bool operator==(MultiIndex, MultiIndex) = default;
};

}  // namespace conformal
