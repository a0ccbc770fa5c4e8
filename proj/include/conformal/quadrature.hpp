#pragma once

#include <algorithm>
#include <cmath>
#include <queue>
#include <span>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace conformal::quadrature {

struct Result {
  double value = 0.0;
  /// Sum of |Kronrod - Gauss| over the final partition.
  double error = 0.0;
  int evaluations = 0;
  bool converged = true;
};

struct Options {
  double abs_tol = 1e-10;
  double rel_tol = 0.0;
  int max_intervals = 500;
};

namespace detail {

struct Segment {
  double a;
  double b;
  double value;
  double error;
  bool operator<(const Segment& other) const { return error < other.error; }
};

template <class F>
Segment gauss_kronrod_15(F& f, double a, double b) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
  using G = boost::math::quadrature::gauss<double, 7>;
  const auto& x = GK::abscissa();
  const auto& wk = GK::weights();
  const auto& wg = G::weights();
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double f0 = f(mid);
  double kronrod = f0 * wk[0];
  double gauss = f0 * wg[0];
  for (std::size_t i = 1; i < x.size(); ++i) {
    const double dx = half * x[i];
    const double pair = f(mid - dx) + f(mid + dx);
    kronrod += pair * wk[i];
    if (i % 2 == 0) gauss += pair * wg[i / 2];
  }
  return {a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
}

}  // namespace detail

/// Global adaptive Gauss-Kronrod (7/15) over consecutive breakpoints. The
/// segment with the largest error estimate is bisected until the summed
/// estimate meets max(abs_tol, rel_tol*|value|) or max_intervals is reached.
template <class F>
Result integrate(F&& f, std::span<const double> breakpoints, const Options& opt = {}) {
  Result out;
  if (breakpoints.size() < 2) return out;
  std::priority_queue<detail::Segment> heap;
  double total = 0.0;
  double err = 0.0;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    const double a = breakpoints[i];
    const double b = breakpoints[i + 1];
    if (!(b > a)) continue;
    auto seg = detail::gauss_kronrod_15(f, a, b);
    out.evaluations += 15;
    total += seg.value;
    err += seg.error;
    heap.push(seg);
  }
  auto target = [&] { return std::max(opt.abs_tol, opt.rel_tol * std::abs(total)); };
  while (err > target() && !heap.empty()) {
    if (static_cast<int>(heap.size()) >= opt.max_intervals) {
      out.converged = false;
      break;
    }
    const auto worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      out.converged = false;
      break;
    }
    auto left = detail::gauss_kronrod_15(f, worst.a, mid);
    auto right = detail::gauss_kronrod_15(f, mid, worst.b);
    out.evaluations += 30;
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  // Re-sum to shed accumulated cancellation in the running totals.
  total = 0.0;
  err = 0.0;
  while (!heap.empty()) {
    total += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  out.value = total;
  out.error = err;
  if (err > target()) out.converged = false;
  return out;
}

template <class F>
Result integrate(F&& f, double a, double b, const Options& opt = {}) {
  const double pts[2] = {a, b};
  return integrate(std::forward<F>(f), std::span<const double>(pts, 2), opt);
}

/// Trapezoidal rule for a smooth 2*pi-periodic integrand over [0, 2*pi),
/// doubling the node count until successive values agree to abs_tol.
template <class F>
Result integrate_periodic(F&& f, double abs_tol, int min_nodes = 32, int max_nodes = 1 << 14) {
  Result out;
  const double two_pi = 2.0 * M_PI;
  int n = min_nodes;
  double sum = 0.0;
  for (int k = 0; k < n; ++k) sum += f(two_pi * k / n);
  out.evaluations = n;
  double value = sum * two_pi / n;
  while (true) {
    if (2 * n > max_nodes) {
      out.converged = false;
      break;
    }
    double extra = 0.0;
    for (int k = 0; k < n; ++k) extra += f(two_pi * (k + 0.5) / n);
    out.evaluations += n;
    sum += extra;
    n *= 2;
    const double refined = sum * two_pi / n;
    out.error = std::abs(refined - value);
    value = refined;
    if (out.error <= abs_tol) break;
  }
  out.value = value;
  return out;
}

}  // namespace conformal::quadrature
