#include "conformal/finite_difference.hpp"

#include <array>
#include <cmath>
#include <string>

#include "conformal/errors.hpp"

namespace conformal {

double MultiIndex::factorial() const noexcept {
  double f = 1.0;
  for (int k = 2; k <= j1; ++k) f *= k;
  for (int k = 2; k <= j2; ++k) f *= k;
  return f;
}

std::vector<MultiIndex> MultiIndex::unit_steps() const {
  std::vector<MultiIndex> steps;
  steps.reserve(static_cast<std::size_t>(order()));
  for (int k = 0; k < j1; ++k) steps.push_back({1, 0});
  for (int k = 0; k < j2; ++k) steps.push_back({0, 1});
  return steps;
}

MultiIndex MultiIndex::partial_sum(int tau) const {
  const auto steps = unit_steps();
  if (tau < 0 || tau > order()) throw ParameterError("MultiIndex::partial_sum: tau out of range");
  MultiIndex sum;
  for (int k = 0; k < tau; ++k) sum = sum + steps[static_cast<std::size_t>(k)];
  return sum;
}

MultiIndex MultiIndex::tail(int tau) const {
  const auto steps = unit_steps();
  const int n = order();
  if (tau < 1 || tau > n - 1) throw ParameterError("MultiIndex::tail: tau out of range");
  MultiIndex sum;
  for (int k = tau + 2; k <= n; ++k) sum = sum + steps[static_cast<std::size_t>(k - 1)];
  return sum;
}

std::vector<MultiIndex> MultiIndex::up_to(int n) {
  std::vector<MultiIndex> all;
  for (int total = 0; total <= n; ++total) {
    for (int j2 = 0; j2 <= total; ++j2) all.push_back({total - j2, j2});
  }
  return all;
}

namespace {

constexpr int kMaxOrder = 6;

int half_width(int order) { return order == 0 ? 0 : (order + 1) / 2; }

// Fornberg weights for the m-th derivative at 0 on nodes -p..p (unit spacing).
std::vector<double> central_weights(int m) {
  const int p = half_width(m);
  const int count = 2 * p + 1;
  std::vector<double> x(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) x[static_cast<std::size_t>(i)] = i - p;
  // c[i][k]: weight of node i for derivative k.
  std::vector<std::vector<double>> c(static_cast<std::size_t>(count),
                                     std::vector<double>(static_cast<std::size_t>(m + 1), 0.0));
  double c1 = 1.0;
  double c4 = x[0];
  c[0][0] = 1.0;
  for (int i = 1; i < count; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[static_cast<std::size_t>(i)];
    for (int j = 0; j < i; ++j) {
      const double c3 = x[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(j)];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) {
          c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        }
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) w[static_cast<std::size_t>(i)] = c[i][m];
  return w;
}

const std::vector<double>& weights_for(int m) {
  static const std::array<std::vector<double>, kMaxOrder + 1> table = [] {
    std::array<std::vector<double>, kMaxOrder + 1> t;
    for (int k = 0; k <= kMaxOrder; ++k) t[static_cast<std::size_t>(k)] = central_weights(k);
    return t;
  }();
  return table[static_cast<std::size_t>(m)];
}

void check_stencil(ComplexPoint z, double h, int n, const std::optional<PuncturedDisk>& domain) {
  if (!(h > 0.0) || !std::isfinite(h)) throw ParameterError("field_deriv: step must be positive");
  if (n < 0 || n > kMaxOrder) {
    throw ParameterError("field_deriv: total order must be in [0, " + std::to_string(kMaxOrder) + "]");
  }
  if (!domain) return;
  const double extent = std::sqrt(2.0) * std::max(1, half_width(n)) * h;
  if (!domain->contains_disk(z, extent)) {
    throw DomainError("field_deriv: step too large, stencil of extent " + std::to_string(extent) +
                      " leaves the domain");
  }
}

bool cancellation_warning(ComplexPoint z, double h, int n, const std::optional<PuncturedDisk>& domain) {
  if (n < 5) return false;
  const double scale = domain ? domain->local_scale(z) : 1.0;
  return h < 1e-3 * scale;
}

// Partials of order n at one step level, indexed by j2.
std::vector<double> partials_at_step(const ScalarField& field, int n, ComplexPoint z, double h) {
  const int p = std::max(1, half_width(n));
  const int width = 2 * p + 1;
  std::vector<double> samples(static_cast<std::size_t>(width * width), 0.0);
  std::vector<bool> needed(samples.size(), false);
  for (int j2 = 0; j2 <= n; ++j2) {
    const int j1 = n - j2;
    const int p1 = half_width(j1);
    const int p2 = half_width(j2);
    for (int a = -p1; a <= p1; ++a) {
      for (int b = -p2; b <= p2; ++b) needed[static_cast<std::size_t>((a + p) * width + (b + p))] = true;
    }
  }
  for (int a = -p; a <= p; ++a) {
    for (int b = -p; b <= p; ++b) {
      const auto idx = static_cast<std::size_t>((a + p) * width + (b + p));
      if (needed[idx]) samples[idx] = field(ComplexPoint{z.re() + a * h, z.im() + b * h});
    }
  }
  std::vector<double> out(static_cast<std::size_t>(n + 1), 0.0);
  for (int j2 = 0; j2 <= n; ++j2) {
    const int j1 = n - j2;
    const auto& w1 = weights_for(j1);
    const auto& w2 = weights_for(j2);
    const int p1 = half_width(j1);
    const int p2 = half_width(j2);
    double acc = 0.0;
    for (int a = -p1; a <= p1; ++a) {
      const double wa = w1[static_cast<std::size_t>(a + p1)];
      if (wa == 0.0) continue;
      for (int b = -p2; b <= p2; ++b) {
        const double wb = w2[static_cast<std::size_t>(b + p2)];
        if (wb == 0.0) continue;
        acc += wa * wb * samples[static_cast<std::size_t>((a + p) * width + (b + p))];
      }
    }
    out[static_cast<std::size_t>(j2)] = acc / std::pow(h, n);
  }
  return out;
}

}  // namespace

std::vector<DerivativeEstimate> field_partials(const ScalarField& field, int n, ComplexPoint z,
                                               double h, const std::optional<PuncturedDisk>& domain) {
  check_stencil(z, h, n, domain);
  const bool warn = cancellation_warning(z, h, n, domain);
  if (n == 0) return {DerivativeEstimate{field(z), 0.0, false}};

  // table[level][k] for each j2.
  std::vector<std::vector<std::vector<double>>> table(static_cast<std::size_t>(n + 1));
  double step = h;
  for (int level = 0; level < kRichardsonLevels; ++level, step *= 0.5) {
    const auto d = partials_at_step(field, n, z, step);
    for (int j2 = 0; j2 <= n; ++j2) {
      auto& t = table[static_cast<std::size_t>(j2)];
      std::vector<double> row{d[static_cast<std::size_t>(j2)]};
      double factor = 4.0;
      for (int k = 1; k <= level; ++k, factor *= 4.0) {
        const double prev = t[static_cast<std::size_t>(level - 1)][static_cast<std::size_t>(k - 1)];
        row.push_back(row[static_cast<std::size_t>(k - 1)] +
                      (row[static_cast<std::size_t>(k - 1)] - prev) / (factor - 1.0));
      }
      t.push_back(std::move(row));
    }
  }
  std::vector<DerivativeEstimate> out;
  out.reserve(static_cast<std::size_t>(n + 1));
  for (int j2 = 0; j2 <= n; ++j2) {
    const auto& last = table[static_cast<std::size_t>(j2)].back();
    const double best = last.back();
    const double err = last.size() > 1 ? std::abs(best - last[last.size() - 2]) : 0.0;
    out.push_back({best, err, warn});
  }
  return out;
}

DerivativeEstimate field_deriv(const ScalarField& field, MultiIndex J, ComplexPoint z, double h,
                               const std::optional<PuncturedDisk>& domain) {
  if (J.j1 < 0 || J.j2 < 0) throw ParameterError("field_deriv: negative multi-index");
  return field_partials(field, J.order(), z, h, domain)[static_cast<std::size_t>(J.j2)];
}

WirtingerEstimate wirtinger_deriv(const ScalarField& field, int n_bar, int n_hol, ComplexPoint z,
                                  double h, const std::optional<PuncturedDisk>& domain) {
  if (n_bar < 0 || n_hol < 0) throw ParameterError("wirtinger_deriv: negative order");
  const int n = n_bar + n_hol;
  const auto partials = field_partials(field, n, z, h, domain);
  using cd = std::complex<double>;
  // (d1 + i d2)^n_bar (d1 - i d2)^n_hol expanded in powers of d2.
  std::vector<cd> coeff(static_cast<std::size_t>(n + 1), cd{0.0, 0.0});
  auto binom = [](int a, int b) {
    double r = 1.0;
    for (int k = 1; k <= b; ++k) r = r * (a - b + k) / k;
    return r;
  };
  const cd I{0.0, 1.0};
  for (int s = 0; s <= n_bar; ++s) {
    for (int t = 0; t <= n_hol; ++t) {
      coeff[static_cast<std::size_t>(s + t)] +=
          binom(n_bar, s) * binom(n_hol, t) * std::pow(I, s) * std::pow(-I, t);
    }
  }
  cd value{0.0, 0.0};
  double err = 0.0;
  bool warn = false;
  for (int k = 0; k <= n; ++k) {
    const auto& p = partials[static_cast<std::size_t>(k)];
    value += coeff[static_cast<std::size_t>(k)] * p.value;
    err += std::abs(coeff[static_cast<std::size_t>(k)]) * p.error_estimate;
    warn = warn || p.accuracy_warning;
  }
  const double scale = std::ldexp(1.0, -n);
  return {value * scale, err * scale, warn};
}

double relative_step(int order) {
  static constexpr std::array<double, kMaxOrder + 1> steps{1e-3, 1e-3, 1e-2, 3e-2, 5e-2, 8e-2, 1e-1};
  if (order < 0 || order > kMaxOrder) throw ParameterError("relative_step: order out of range");
  return steps[static_cast<std::size_t>(order)];
}

double default_step(ComplexPoint z, int order, const PuncturedDisk& domain) {
  return relative_step(order) * domain.local_scale(z);
}

}  // namespace conformal
