#include "conformal/potential.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>

#include "conformal/errors.hpp"
#include "conformal/quadrature.hpp"

namespace conformal {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;
constexpr int kShellLevels = 10;

double int_pow(double x, int k) {
  double out = 1.0;
  for (int i = 0; i < k; ++i) out *= x;
  return out;
}

double factorial(int n) {
  double out = 1.0;
  for (int i = 2; i <= n; ++i) out *= i;
  return out;
}

/// d^J log|w| at w != 0: Re(i^{j2} (-1)^{n-1} (n-1)! / w^n).
double kernel_at(MultiIndex J, std::complex<double> w) {
  const int n = J.order();
  if (n == 0) return std::log(std::abs(w));
  static const std::complex<double> kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  const double sign = (n % 2 == 1) ? 1.0 : -1.0;
  return std::real(kIPow[J.j2 % 4] * (sign * factorial(n - 1)) / std::pow(w, n));
}

/// Coefficients d^a f(z)/a! for |a| <= n, evaluated once per z.
struct TaylorTable {
  std::vector<MultiIndex> index;
  std::vector<double> coef;

  TaylorTable(const SourceField& f, int n, ComplexPoint z, MultiIndex shift = {}) {
    if (n < 0) return;
    for (const auto& a : MultiIndex::up_to(n)) {
      index.push_back(a);
      coef.push_back(f.derivative(a + shift, z) / a.factorial());
    }
  }

  /// Value at zeta = z + (dx, dy).
  double operator()(double dx, double dy) const {
    double sum = 0.0;
    for (std::size_t k = 0; k < index.size(); ++k) {
      sum += coef[k] * int_pow(dx, index[k].j1) * int_pow(dy, index[k].j2);
    }
    return sum;
  }
};

/// Area integral over zeta in D_outer in polar coordinates centred at z.
/// g(rho, c, s) is the full integrand including the Jacobian rho; the result
/// is scaled by 1/(2 pi). kink is a circle across which g is not smooth.
struct PolarRegion {
  ComplexPoint z;
  double outer = 1.0;
  std::optional<double> kink;
  const std::vector<ComplexPoint>* singular = nullptr;
  double rho_cut = 0.0;
};

template <class G>
PotentialResult polar_integral(const PolarRegion& reg, G&& g, const QuadratureConfig& cfg) {
  const double x = reg.z.re();
  const double y = reg.z.im();
  const double z2 = x * x + y * y;
  const double zabs = std::sqrt(z2);
  const double R = reg.outer;
  const bool interior = zabs < R;

  quadrature::Options inner_opt;
  inner_opt.abs_tol = 0.05 * cfg.abs_tol;
  inner_opt.max_intervals = cfg.max_intervals;
  double max_inner_error = 0.0;
  std::vector<double> pts;

  auto ray = [&](double theta) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const double b = x * c + y * s;
    const double disc = b * b - (z2 - R * R);
    if (disc <= 0.0) return 0.0;
    const double sq = std::sqrt(disc);
    const double hi = -b + sq;
    const double lo = interior ? 0.0 : std::max(0.0, -b - sq);
    if (!(hi > lo)) return 0.0;
    pts.assign({lo, hi});
    auto add = [&](double p) {
      if (p > lo && p < hi) pts.push_back(p);
    };
    if (reg.kink) {
      const double dk = b * b - (z2 - *reg.kink * *reg.kink);
      if (dk > 0.0) {
        add(-b - std::sqrt(dk));
        add(-b + std::sqrt(dk));
      }
    }
    if (reg.singular) {
      for (const auto& p : *reg.singular) add((p.re() - x) * c + (p.im() - y) * s);
    }
    std::sort(pts.begin(), pts.end());
    if (lo == 0.0) {
      const double first = pts[1];
      for (int k = 1; k <= kShellLevels; ++k) {
        const double shell = first * std::pow(4.0, -k);
        if (shell <= reg.rho_cut) break;
        pts.push_back(shell);
      }
      if (reg.rho_cut > 0.0) {
        pts.front() = std::min(reg.rho_cut, 0.5 * first);
      }
      std::sort(pts.begin(), pts.end());
    }
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [hi](double a, double b2) { return b2 - a <= 1e-14 * hi; }),
              pts.end());
    auto res = quadrature::integrate([&](double rho) { return g(rho, c, s); }, pts, inner_opt);
    max_inner_error = std::max(max_inner_error, res.error);
    return res.value;
  };

  quadrature::Options outer_opt;
  outer_opt.abs_tol = 0.5 * cfg.abs_tol;
  outer_opt.max_intervals = cfg.max_intervals;
  std::vector<double> angles;
  quadrature::Result outer;

  auto singular_dirs = [&](auto&& push) {
    if (reg.singular) {
      for (const auto& p : *reg.singular) {
        const double dx = p.re() - x;
        const double dy = p.im() - y;
        if (std::hypot(dx, dy) > 1e-14 * R) push(std::atan2(dy, dx));
      }
    }
    if (reg.kink && zabs > *reg.kink) {
      const double centre = std::atan2(-y, -x);
      const double half = std::asin(*reg.kink / zabs);
      push(centre - half);
      push(centre + half);
    }
  };

  if (interior) {
    for (int k = 0; k <= 8; ++k) angles.push_back(kTwoPi * k / 8.0);
    singular_dirs([&](double t) {
      t = std::fmod(t, kTwoPi);
      if (t < 0.0) t += kTwoPi;
      angles.push_back(t);
    });
    std::sort(angles.begin(), angles.end());
    angles.erase(std::unique(angles.begin(), angles.end(), [](double a, double b2) { return b2 - a <= 1e-12; }),
                 angles.end());
    outer = quadrature::integrate(ray, angles, outer_opt);
  } else {
    // theta = centre + half * sin(phi) clusters nodes at the tangent rays.
    const double centre = std::atan2(-y, -x);
    const double half = std::asin(std::min(1.0, R / zabs));
    angles = {-M_PI / 2, -M_PI / 4, 0.0, M_PI / 4, M_PI / 2};
    singular_dirs([&](double t) {
      const double d = std::remainder(t - centre, kTwoPi);
      if (std::abs(d) < half) angles.push_back(std::asin(d / half));
    });
    std::sort(angles.begin(), angles.end());
    angles.erase(std::unique(angles.begin(), angles.end(), [](double a, double b2) { return b2 - a <= 1e-12; }),
                 angles.end());
    outer = quadrature::integrate(
        [&](double phi) { return ray(centre + half * std::sin(phi)) * half * std::cos(phi); }, angles,
        outer_opt);
  }

  PotentialResult out;
  out.value = outer.value / kTwoPi;
  out.quadrature_error_estimate = (outer.error + kTwoPi * max_inner_error) / kTwoPi;
  // Individual rays may stall on rounding noise; only a total estimate above
  // tolerance is a failure.
  if (out.quadrature_error_estimate > cfg.abs_tol || (!outer.converged && outer.error > outer_opt.abs_tol)) {
    std::ostringstream os;
    os << "polar quadrature did not reach tolerance " << cfg.abs_tol << " at z = (" << x << ", " << y
       << "); estimate " << out.quadrature_error_estimate;
    throw ConvergenceError(os.str(), {outer.error, max_inner_error});
  }
  return out;
}

void require_interior(const SourceField& f, ComplexPoint z, const char* who) {
  if (!(z.abs() < f.support_radius)) {
    std::ostringstream os;
    os << who << ": z = (" << z.re() << ", " << z.im() << ") must lie inside D_" << f.support_radius;
    throw DomainError(os.str());
  }
}

// Potential on a polar grid centred at the origin through the angular
// Fourier expansion of the kernel,
//   log|z - zeta| = log r_> - sum_{m>=1} (r_</r_>)^m cos(m(theta - phi)) / m,
// which turns the area integral into one radial integral per mode.
class SpectralPotential {
 public:
  SpectralPotential(const SourceField& f, int angles, double tol) : f_(f), angles_(angles), tol_(tol) {
    modes_ = angles_ / 2 - 1;
    twiddle_.resize(static_cast<std::size_t>(angles_) * (modes_ + 1));
    for (int k = 0; k < angles_; ++k) {
      for (int m = 0; m <= modes_; ++m) {
        twiddle_[k * (modes_ + 1) + m] = std::polar(1.0 / angles_, -kTwoPi * m * k / angles_);
      }
    }
  }

  /// omega at every node of the grid.
  std::vector<double> evaluate(const AnnularGrid& grid) {
    nodes_.clear();
    const double R = f_.support_radius;
    const double first = std::min(grid.r_min(), R);
    // [0, first] through s = first * exp(1 - 1/t), t in (0, 1].
    add_adaptive(0.0, 1.0, true, first, 0);
    // Mass below the cut-off of modes_at, bounded by the integrand at the cut.
    const double t_cut = 1.0 / (1.0 - std::log(kCutoff / first));
    const double s_cut = 2.0 * kCutoff;
    error_ += std::abs(modes_at(s_cut)[0]) * s_cut * s_cut / (t_cut * t_cut) * t_cut;
    std::vector<double> cuts{first};
    for (int i = 0; i < grid.nr(); ++i) {
      if (grid.radius(i) > first && grid.radius(i) < R) cuts.push_back(grid.radius(i));
    }
    cuts.push_back(R);
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      if (cuts[k + 1] > cuts[k]) add_adaptive(cuts[k], cuts[k + 1], false, first, 0);
    }

    std::vector<double> out(grid.size(), std::numeric_limits<double>::quiet_NaN());
    if (!std::isfinite(error_)) return out;
    std::vector<std::complex<double>> omega_m(modes_ + 1);
    for (int i = 0; i < grid.nr(); ++i) {
      const double r = grid.radius(i);
      std::fill(omega_m.begin(), omega_m.end(), std::complex<double>{});
      for (const auto& node : nodes_) {
        const double big = std::max(node.s, r);
        const double ratio = std::min(node.s, r) / big;
        omega_m[0] += node.w * node.F[0] * std::log(big);
        double power = 1.0;
        for (int m = 1; m <= modes_; ++m) {
          power *= ratio;
          if (power < 1e-300) break;
          omega_m[m] -= node.w * node.F[m] * power / (2.0 * m);
        }
      }
      for (int j = 0; j < grid.ntheta(); ++j) {
        const double theta = grid.angle(j);
        double value = omega_m[0].real();
        for (int m = 1; m <= modes_; ++m) value += 2.0 * (omega_m[m] * std::polar(1.0, m * theta)).real();
        out[grid.index(i, j)] = value;
      }
    }
    return out;
  }

 private:
  static constexpr double kCutoff = 1e-150;

  struct Node {
    double s;
    double w;  // quadrature weight including the area element s ds
    std::vector<std::complex<double>> F;
  };

  std::vector<std::complex<double>> modes_at(double s) const {
    std::vector<std::complex<double>> F(modes_ + 1);
    if (s < kCutoff) return F;
    for (int k = 0; k < angles_; ++k) {
      const double v = f_.value(ComplexPoint::polar(s, kTwoPi * k / angles_));
      if (v == 0.0) continue;
      if (!std::isfinite(v)) {
        F.assign(modes_ + 1, std::complex<double>(std::numeric_limits<double>::quiet_NaN(), 0.0));
        return F;
      }
      const auto* tw = &twiddle_[k * (modes_ + 1)];
      for (int m = 0; m <= modes_; ++m) F[m] += v * tw[m];
    }
    return F;
  }

  void add_adaptive(double a, double b, bool mapped, double first, int depth) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    using G = boost::math::quadrature::gauss<double, 7>;
    const auto& x = GK::abscissa();
    const auto& wk = GK::weights();
    const auto& wg = G::weights();
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    std::vector<Node> pending;
    std::vector<std::complex<double>> kron(modes_ + 1), gauss(modes_ + 1);
    auto add_node = [&](double t, double wkron, double wgauss) {
      double s = t, jac = 1.0;
      if (mapped) {
        s = first * std::exp(1.0 - 1.0 / t);
        jac = s / (t * t);
      }
      Node node{s, wkron * half * jac * s, modes_at(s)};
      for (int m = 0; m <= modes_; ++m) {
        kron[m] += node.w * node.F[m];
        gauss[m] += wgauss * half * jac * s * node.F[m];
      }
      pending.push_back(std::move(node));
    };
    add_node(mid, wk[0], wg[0]);
    for (std::size_t i = 1; i < x.size(); ++i) {
      const double wgi = i % 2 == 0 ? wg[i / 2] : 0.0;
      add_node(mid - half * x[i], wk[i], wgi);
      add_node(mid + half * x[i], wk[i], wgi);
    }
    double err = 0.0;
    for (int m = 0; m <= modes_; ++m) err = std::max(err, std::abs(kron[m] - gauss[m]));
    if (!std::isfinite(err)) {
      error_ = std::numeric_limits<double>::infinity();
      return;
    }
    if (err <= tol_ || depth >= 40) {
      error_ += depth >= 40 ? err : 0.0;
      for (auto& n : pending) nodes_.push_back(std::move(n));
      return;
    }
    add_adaptive(a, mid, mapped, first, depth + 1);
    add_adaptive(mid, b, mapped, first, depth + 1);
  }

  const SourceField& f_;
  int angles_;
  int modes_;
  double tol_;
  double error_ = 0.0;
  std::vector<std::complex<double>> twiddle_;
  std::vector<Node> nodes_;

 public:
  double unresolved_error() const { return error_; }
};

}  // namespace

double SourceField::value(ComplexPoint z) const {
  if (z.abs() > support_radius) return 0.0;
  return eval(z);
}

double SourceField::derivative(MultiIndex a, ComplexPoint z) const {
  if (a.j1 < 0 || a.j2 < 0) throw ParameterError("SourceField::derivative: negative multi-index");
  if (a.order() == 0 && !derivs) return eval(z);
  if (!derivs) {
    throw SmoothnessError("SourceField: derivative of order " + std::to_string(a.order()) +
                          " requested but no derivative callback is attached");
  }
  return (*derivs)(a, z);
}

SourceField SourceField::constant(double c, double radius) {
  if (!(radius > 0.0)) throw ParameterError("SourceField::constant: radius must be positive");
  SourceField f;
  f.eval = [c](ComplexPoint) { return c; };
  f.derivs = [c](MultiIndex a, ComplexPoint) { return a.order() == 0 ? c : 0.0; };
  f.support_radius = radius;
  f.hoelder = HoelderTag{std::numeric_limits<int>::max(), 1.0};
  return f;
}

double log_kernel_deriv(MultiIndex J, ComplexPoint z, ComplexPoint zeta) {
  if (J.j1 < 0 || J.j2 < 0) throw ParameterError("log_kernel_deriv: negative multi-index");
  const auto w = z.value() - zeta.value();
  if (w == std::complex<double>(0.0, 0.0)) throw SingularPointError("log_kernel_deriv: z equals zeta");
  return kernel_at(J, w);
}

double taylor_poly(const SourceField& f, int n, ComplexPoint z, ComplexPoint zeta) {
  if (n < 0) throw ParameterError("taylor_poly: degree must be >= 0");
  if (n == 0) return f.eval(z);
  if (!f.derivs) throw SmoothnessError("taylor_poly: degree " + std::to_string(n) + " needs derivatives of f");
  const TaylorTable table(f, n, z);
  return table(zeta.re() - z.re(), zeta.im() - z.im());
}

PotentialResult log_potential(const SourceField& f, ComplexPoint z, const QuadratureConfig& cfg) {
  if (!(f.support_radius > 0.0)) throw ParameterError("log_potential: support radius must be positive");
  PolarRegion reg{z, f.support_radius, std::nullopt, &f.singular_points, 0.0};
  const double x = z.re();
  const double y = z.im();
  return polar_integral(
      reg, [&](double rho, double c, double s) { return rho * std::log(rho) * f.eval({x + rho * c, y + rho * s}); },
      cfg);
}

PotentialResult potential_deriv(const SourceField& f, MultiIndex J, ComplexPoint z,
                                std::optional<double> boundary_radius, const QuadratureConfig& cfg) {
  if (J.j1 < 0 || J.j2 < 0) throw ParameterError("potential_deriv: negative multi-index");
  const int n = J.order();
  if (n == 0) return log_potential(f, z, cfg);
  require_interior(f, z, "potential_deriv");
  const double r = f.support_radius;
  const double x = z.re();
  const double y = z.im();

  if (n == 1) {
    // rho * d^J L(-rho e) = d^J L(-e): the Jacobian cancels the kernel singularity.
    PolarRegion reg{z, r, std::nullopt, &f.singular_points, 0.0};
    return polar_integral(
        reg, [&](double rho, double c, double s) { return kernel_at(J, {-c, -s}) * f.eval({x + rho * c, y + rho * s}); },
        cfg);
  }

  const double R = boundary_radius.value_or(2.0 * r);
  if (!(R > r)) {
    std::ostringstream os;
    os << "potential_deriv: boundary radius " << R << " must exceed the support radius " << r;
    throw ParameterError(os.str());
  }
  if (!f.derivs && n > 2) {
    throw SmoothnessError("potential_deriv: order " + std::to_string(n) + " needs derivatives of f up to order " +
                          std::to_string(n - 2));
  }

  // Area term against f~ - P_{n-2}[f]. Below rho_cut the integrand is pure
  // rounding; the omitted leading term is odd in theta and integrates to 0.
  const TaylorTable taylor(f, n - 2, z);
  const double rho_cut = r * std::pow(std::numeric_limits<double>::epsilon(), 1.0 / n);
  PolarRegion reg{z, R, r, &f.singular_points, rho_cut};
  const double r2 = r * r;
  auto area = polar_integral(
      reg,
      [&](double rho, double c, double s) {
        const double dx = rho * c;
        const double dy = rho * s;
        const double zx = x + dx;
        const double zy = y + dy;
        const double ft = (zx * zx + zy * zy <= r2) ? f.eval({zx, zy}) : 0.0;
        return std::pow(rho, 1 - n) * kernel_at(J, {-c, -s}) * (ft - taylor(dx, dy));
      },
      cfg);

  // Boundary terms on |zeta| = R.
  const auto steps = J.unit_steps();
  double boundary = 0.0;
  double boundary_error = 0.0;
  for (int tau = 1; tau <= n - 1; ++tau) {
    const MultiIndex theta_tau = J.partial_sum(tau);
    const MultiIndex phi_tau = J.tail(tau);
    const MultiIndex e_next = steps[static_cast<std::size_t>(tau)];
    const TaylorTable shifted(f, tau - 1, z, phi_tau);
    auto res = quadrature::integrate_periodic(
        [&](double t) {
          const double c = std::cos(t);
          const double s = std::sin(t);
          const double zx = R * c;
          const double zy = R * s;
          const double normal = e_next.j1 == 1 ? c : s;
          return kernel_at(theta_tau, {x - zx, y - zy}) * shifted(zx - x, zy - y) * normal * R;
        },
        0.1 * cfg.abs_tol);
    if (!res.converged) {
      throw ConvergenceError("potential_deriv: boundary integral did not converge", {res.error});
    }
    boundary += res.value;
    boundary_error += res.error;
  }

  PotentialResult out;
  out.value = area.value - boundary / kTwoPi;
  out.quadrature_error_estimate = area.quadrature_error_estimate + boundary_error / kTwoPi;
  return out;
}

PotentialResult boundary_normal_integral(MultiIndex J, int normal_component, ComplexPoint z, double radius,
                                         double abs_tol) {
  if (normal_component != 1 && normal_component != 2) {
    throw ParameterError("boundary_normal_integral: normal component must be 1 or 2");
  }
  if (!(radius > 0.0)) throw ParameterError("boundary_normal_integral: radius must be positive");
  const double gap = std::abs(z.abs() - radius);
  if (!(gap > 1e-12 * radius)) throw SingularPointError("boundary_normal_integral: z lies on the circle");
  // Trapezoid convergence degrades like (|z|/radius)^N; scale the node cap.
  auto res = quadrature::integrate_periodic(
      [&](double t) {
        const double c = std::cos(t);
        const double s = std::sin(t);
        const double normal = normal_component == 1 ? c : s;
        return kernel_at(J, {z.re() - radius * c, z.im() - radius * s}) * normal * radius;
      },
      abs_tol, 32, 1 << 20);
  if (!res.converged) throw ConvergenceError("boundary_normal_integral: did not converge", {res.error});
  return {res.value, res.error};
}

RieszDecomposition riesz_decompose(const GridField& u, const SourceField& laplacian_u, const RieszConfig& cfg) {
  const auto& grid = u.grid;
  if (u.values.size() != grid.size()) throw ParameterError("riesz_decompose: field size does not match its grid");
  if (cfg.growth_rings < 2 || cfg.growth_rings > grid.nr()) {
    throw ParameterError("riesz_decompose: growth_rings must lie in [2, nr]");
  }

  // Least-squares slope of max_{|z|=r} u against L = log(1/r) on the inner rings.
  double sl = 0.0, sm = 0.0, sll = 0.0, slm = 0.0;
  const int k = cfg.growth_rings;
  for (int i = 0; i < k; ++i) {
    const double L = -std::log(grid.radius(i));
    const double m = u.ring_max(i);
    sl += L;
    sm += m;
    sll += L * L;
    slm += L * m;
  }
  const double slope = (k * slm - sl * sm) / (k * sll - sl * sl);
  if (slope > cfg.growth_threshold) {
    std::ostringstream os;
    os << "riesz_decompose: u violates sublinear growth; sup u / log(1/r) slope = " << slope
       << " exceeds " << cfg.growth_threshold;
    throw HypothesisError(os.str(), slope);
  }

  RieszDecomposition out{u, u, 0.0, slope, 0.0, false};
  // Spectral path when every singular point sits at the centre; the two
  // angular resolutions give the error estimate. Pointwise quadrature otherwise.
  const bool centred = std::all_of(laplacian_u.singular_points.begin(), laplacian_u.singular_points.end(),
                                   [](ComplexPoint p) { return p.abs() == 0.0; });
  bool done = false;
  if (centred) {
    const int coarse = std::max(32, 2 * grid.ntheta());
    const double radial_tol = 0.01 * cfg.quadrature.abs_tol;
    SpectralPotential lo(laplacian_u, coarse, radial_tol);
    SpectralPotential hi(laplacian_u, 2 * coarse, radial_tol);
    const auto w_lo = lo.evaluate(grid);
    const auto w_hi = hi.evaluate(grid);
    double est = std::max(lo.unresolved_error(), hi.unresolved_error());
    for (std::size_t k = 0; k < w_hi.size() && std::isfinite(est); ++k) {
      const double diff = std::abs(w_hi[k] - w_lo[k]);
      est = std::isfinite(diff) ? std::max(est, diff) : diff;
    }
    if (std::isfinite(est) && est <= cfg.quadrature.abs_tol) {
      for (std::size_t k = 0; k < w_hi.size(); ++k) {
        out.omega.values[k] = w_hi[k];
        out.h.values[k] = u.values[k] - w_hi[k];
      }
      out.max_quadrature_error = est;
      done = true;
    }
  }
  if (!done) {
    for (int i = 0; i < grid.nr(); ++i) {
      for (int j = 0; j < grid.ntheta(); ++j) {
        const auto res = log_potential(laplacian_u, grid.point(i, j), cfg.quadrature);
        out.omega.at(i, j) = res.value;
        out.h.at(i, j) = u.at(i, j) - res.value;
        out.max_quadrature_error = std::max(out.max_quadrature_error, res.quadrature_error_estimate);
      }
    }
  }
  const double reference = out.h.ring_mean(0);
  for (int i = 1; i < grid.nr(); ++i) {
    out.mean_value_residual = std::max(out.mean_value_residual, std::abs(out.h.ring_mean(i) - reference));
  }
  out.harmonic = out.mean_value_residual <= cfg.mean_value_tolerance;
  return out;
}

}  // namespace conformal
