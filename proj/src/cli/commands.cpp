#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include "conformal/asymptotics.hpp"
#include "conformal/bounds.hpp"
#include "conformal/cli.hpp"
#include "conformal/solver.hpp"

namespace conformal::cli {

namespace {

constexpr const char* kCrlf = "\r\n";

void write_file(const std::string& dir, const std::string& name, const std::string& content) {
  std::filesystem::create_directories(dir);
  const auto path = std::filesystem::path(dir) / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << content;
}

std::uint64_t seed_of(const ConfigNode& root, const RunOptions& opt) {
  if (!root.has("seed")) return opt.seed;
  const auto& v = root.raw("seed");
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    throw ConfigError("seed: expected a nonnegative integer");
  }
  return v.get<std::uint64_t>();
}

Json point_json(ComplexPoint z) { return Json::array({number_json(z.re()), number_json(z.im())}); }

// ---------------------------------------------------------------- verify

using Records = std::vector<VerdictRecord>;
using Task = std::function<Records()>;

struct CheckContext {
  std::string id;
  std::string tag;
  std::uint64_t seed;
  bool expect_pass;
};

VerdictRecord scalar_record(const CheckContext& c, std::vector<double> expected, std::vector<double> measured,
                            double tolerance, bool pass, Json witness = nullptr) {
  VerdictRecord r;
  r.check_id = c.id;
  r.theorem_tag = c.tag;
  r.expected = std::move(expected);
  r.measured = std::move(measured);
  r.tolerance = tolerance;
  r.pass = pass;
  r.witness = std::move(witness);
  return r;
}

bool within(double measured, double expected, double tol) { return std::abs(measured - expected) <= tol; }

double order_of(const ConfigNode& node, const MetricField& m) {
  if (node.has("alpha")) return node.number("alpha");
  if (m.order_hint()) return *m.order_hint();
  throw ConfigError(node.path() + ".alpha: required for this metric");
}

double kappa_of(const ConfigNode& node, const MetricField& m) {
  if (node.has("kappa0")) return node.number("kappa0");
  if (m.curvature_hint()) return *m.curvature_hint();
  throw ConfigError(node.path() + ".kappa0: required for this metric");
}

LimitOptions limit_options(const ConfigNode& node) {
  LimitOptions opt;
  if (node.has("radii")) opt.radii = node.numbers("radii");
  opt.angles = node.integer_or("angles", 0);
  if (opt.angles < 0) throw ConfigError(node.path() + ".angles: must be >= 0");
  return opt;
}

Task parse_rate(const ConfigNode& node, const CheckContext& c) {
  const auto metric = parse_metric(node.child("metric"));
  const double alpha = order_of(node, metric);
  const int nb = node.integer("n_bar");
  const int nh = node.integer("n_hol");
  if (nb < 0 || nh < 0 || nb + nh < 1 || nb + nh > 5) {
    throw ConfigError(node.path() + ": need n_bar, n_hol >= 0 and 1 <= n_bar + n_hol <= 5");
  }
  if (!(alpha <= 1.0)) throw ConfigError(node.path() + ".alpha: must be <= 1");
  RateOptions ro;
  ro.p_tolerance = node.number_or("p_tolerance", 0.05);
  ro.q_tolerance = node.number_or("q_tolerance", 0.3);
  ro.angles = node.integer_or("angles", 4);
  if (node.has("radii")) ro.radii = node.numbers("radii");
  return [=] {
    const auto rem = extract_remainder(metric.log_field(), alpha);
    const auto chk = remainder_rate(rem, metric.domain(), nb, nh, ro);
    std::vector<double> expected, measured;
    if (chk.predicted_p) {
      expected.push_back(*chk.predicted_p);
      measured.push_back(chk.fit.p);
      if (chk.predicted_q) {
        expected.push_back(*chk.predicted_q);
        measured.push_back(chk.fit.q);
      }
    } else {
      measured.push_back(chk.fit.p);
    }
    Json w;
    w["n_bar"] = nb;
    w["n_hol"] = nh;
    w["q_fit"] = number_json(chk.fit.q);
    w["q_tolerance"] = number_json(ro.q_tolerance);
    w["C"] = number_json(chk.fit.C);
    w["r_squared"] = number_json(chk.fit.r_squared);
    w["consistent"] = chk.consistent;
    w["sharp"] = chk.sharp;
    if (!chk.predicted_p) w["note"] = "no rate asserted for this pattern";
    const bool pass = chk.predicted_p ? chk.sharp : chk.consistent;
    return Records{scalar_record(c, expected, measured, ro.p_tolerance, pass, w)};
  };
}

Task parse_minda(const ConfigNode& node, const CheckContext& c) {
  const auto metric = parse_metric(node.child("metric"));
  const double tol = node.number_or("tolerance", 1e-3);
  double expected = 0.0;
  if (node.has("expected")) {
    expected = node.number("expected");
  } else if (metric.order_hint() && *metric.order_hint() == 1.0) {
    if (!metric.curvature_hint()) throw ConfigError(node.path() + ".expected: required for this metric");
    expected = 1.0 / std::sqrt(-*metric.curvature_hint());
  } else if (!metric.order_hint()) {
    throw ConfigError(node.path() + ".expected: required for this metric");
  }
  const auto lo = limit_options(node);
  return [=] {
    const auto l = minda_limit(metric, lo);
    Json w;
    w["raw_tail"] = Json::array({number_json(l.raw_tail.r), number_json(l.raw_tail.value)});
    w["extrapolation_error"] = number_json(l.extrapolation_error);
    return Records{scalar_record(c, {expected}, {l.value}, tol, within(l.value, expected, tol) && !l.oscillating, w)};
  };
}

Task parse_cusp_limits(const ConfigNode& node, const CheckContext& c) {
  const auto metric = parse_metric(node.child("metric"));
  const double kappa0 = kappa_of(node, metric);
  if (!(kappa0 < 0.0)) throw ConfigError(node.path() + ".kappa0: must be negative");
  const double rel = node.number_or("rel_tolerance", 0.02);
  const auto lo = limit_options(node);
  return [=] {
    const auto l = cusp_derivative_limits(metric, kappa0, lo);
    const std::vector<double> expected{l.expected_first, l.expected_second, l.expected_mixed};
    const std::vector<double> measured{l.first.value, l.second.value, l.mixed.value};
    bool pass = true;
    for (std::size_t i = 0; i < 3; ++i) pass = pass && within(measured[i], expected[i], rel * std::abs(expected[i]));
    Json w;
    w["tolerance_kind"] = "relative";
    w["extrapolation_error"] = Json::array({number_json(l.first.extrapolation_error),
                                            number_json(l.second.extrapolation_error),
                                            number_json(l.mixed.extrapolation_error)});
    return Records{scalar_record(c, expected, measured, rel, pass, w)};
  };
}

Task parse_u_limits(const ConfigNode& node, const CheckContext& c) {
  const auto metric = parse_metric(node.child("metric"));
  const double alpha = order_of(node, metric);
  const int nb = node.integer("n_bar");
  const int nh = node.integer("n_hol");
  if (nb < 0 || nh < 0 || nb + nh < 1 || nb + nh > 5) {
    throw ConfigError(node.path() + ": need n_bar, n_hol >= 0 and 1 <= n_bar + n_hol <= 5");
  }
  if (!(alpha <= 1.0)) throw ConfigError(node.path() + ".alpha: must be <= 1");
  const double rel = node.number_or("rel_tolerance", 0.02);
  const double abs_tol = node.number_or("abs_tolerance", 1e-3);
  const auto lo = limit_options(node);
  return [=] {
    const auto rep = u_deriv_limits(metric.log_field(), metric.domain(), alpha, nb, nh, lo);
    const bool mixed = nb > 0 && nh > 0;
    const double tol = mixed ? abs_tol : rel * std::abs(rep.expected);
    Json w;
    w["extrapolation_error"] = number_json(rep.limit.extrapolation_error);
    if (rep.rescaled) {
      w["rescaled_value"] = number_json(rep.rescaled->value);
      w["rescaled_expected_magnitude"] = number_json(*rep.rescaled_expected_magnitude);
      w["rescaled_sign"] = rep.rescaled->value >= 0.0 ? 1 : -1;
    }
    return Records{scalar_record(c, {rep.expected}, {rep.limit.value}, tol, within(rep.limit.value, rep.expected, tol), w)};
  };
}

Task parse_l_table(const ConfigNode& node, const CheckContext& c) {
  const auto metric = parse_metric(node.child("metric"));
  const std::string mode = node.string("mode");
  const int n = node.integer("n");
  if (n < 0 || n > 4) throw ConfigError(node.path() + ".n: must lie in [0, 4]");
  const double rel = node.number_or("rel_tolerance", 0.05);
  const auto lo = limit_options(node);
  std::function<std::vector<LTableEntry>()> compute;
  if (mode == "cusp") {
    const double kappa0 = kappa_of(node, metric);
    if (!(kappa0 < 0.0)) throw ConfigError(node.path() + ".kappa0: must be negative");
    compute = [=] { return l_table(metric, CuspMode{kappa0}, n, lo); };
  } else if (mode == "corner") {
    const double alpha = order_of(node, metric);
    if (!(alpha < 1.0)) throw ConfigError(node.path() + ".alpha: corner mode needs alpha < 1");
    const auto lp = node.optional_number("l_prime");
    compute = [=] { return l_table(metric, CornerMode{alpha, lp}, n, lo); };
  } else {
    throw ConfigError(node.path() + ".mode: expected 'cusp' or 'corner', got '" + mode + "'");
  }
  return [=] {
    Records out;
    for (const auto& e : compute()) {
      CheckContext ce = c;
      ce.id = c.id + "[" + std::to_string(e.n_bar) + "," + std::to_string(e.n_hol) + "]";
      Json w;
      w["tolerance_kind"] = "relative";
      w["extrapolation_error"] = number_json(e.numeric.extrapolation_error);
      out.push_back(scalar_record(ce, {e.closed_form}, {e.numeric.value}, rel,
                                  within(e.numeric.value, e.closed_form, rel * std::abs(e.closed_form)), w));
    }
    return out;
  };
}

Json verdict_witness(const Verdict& v) {
  Json w;
  if (v.witness) w["point"] = point_json(*v.witness);
  if (!v.reason.empty()) w["reason"] = v.reason;
  w["sk_ok"] = v.sk_ok;
  w["sk_worst_curvature"] = number_json(v.sk_worst_curvature);
  if (v.sk_witness) w["sk_point"] = point_json(*v.sk_witness);
  return w;
}

Task parse_corner_bound(const ConfigNode& node, const CheckContext& c) {
  const auto metric = parse_metric(node.child("metric"));
  const double alpha = order_of(node, metric);
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError(node.path() + ".alpha: must lie in (0, 1)");
  CornerBoundOptions opt;
  opt.tolerance = node.number_or("tolerance", 0.01);
  opt.limits = limit_options(node);
  opt.spot.seed = c.seed;
  return [=] {
    const auto v = corner_bound_check(metric, alpha, opt);
    Json w = verdict_witness(v);
    w["margin"] = number_json(v.margin);
    return Records{scalar_record(c, {v.expected}, {v.measured}, opt.tolerance, v.pass, w)};
  };
}

Task parse_delta(const ConfigNode& node, const CheckContext& c) {
  const double a = node.number("alpha");
  const double b = node.number("beta");
  const double g = node.number("gamma");
  const std::string site = node.string_or("site", "zero");
  const double tol = node.number_or("tolerance", 1e-10);
  PunctureSite s;
  if (site == "zero") s = PunctureSite::zero;
  else if (site == "one") s = PunctureSite::one;
  else if (site == "infinity") s = PunctureSite::infinity;
  else throw ConfigError(node.path() + ".site: expected zero, one or infinity");
  std::optional<ThreePunctureParams> params;
  try {
    params = ThreePunctureParams(a, b, g).at(s);
  } catch (const ParameterError& e) {
    throw ConfigError(node.path() + ": " + e.what());
  }
  const auto p = *params;
  return [=] {
    const auto d = delta_three_puncture(p);
    // Independent oracle: the same product through std::tgamma.
    const double A = p.a(), B = p.b(), C = p.c();
    const double oracle = std::tgamma(C) / std::tgamma(2.0 - C) *
                          std::sqrt(std::tgamma(1.0 - A) * std::tgamma(1.0 - B) * std::tgamma(A + 1.0 - C) *
                                    std::tgamma(B + 1.0 - C) /
                                    (std::tgamma(A) * std::tgamma(B) * std::tgamma(C - A) * std::tgamma(C - B)));
    Json w;
    w["a"] = number_json(A);
    w["b"] = number_json(B);
    w["c"] = number_json(C);
    w["bound"] = number_json(d.bound);
    const bool pass = within(d.delta, oracle, tol) && d.bound > 0.0 && std::isfinite(d.bound);
    return Records{scalar_record(c, {oracle}, {d.delta}, tol, pass, w)};
  };
}

Task parse_domination(const ConfigNode& node, const CheckContext& c, bool maximal) {
  const auto metric = parse_metric(node.child("metric"));
  const int samples = node.integer_or("samples", 200);
  if (samples < 1) throw ConfigError(node.path() + ".samples: must be >= 1");
  SpotCheckOptions spot;
  spot.seed = c.seed;
  spot.curvature_tolerance = node.number_or("curvature_tolerance", 1e-3);
  const auto& d = metric.domain();
  double alpha = 0.0, R = 1.0;
  if (maximal) {
    alpha = node.number("alpha");
    R = node.number("R");
    if (!(alpha <= 1.0) || !(R > 0.0)) throw ConfigError(node.path() + ": need alpha <= 1 and R > 0");
  }
  const double limit = maximal ? std::min(R, d.outer_radius) : d.outer_radius;
  const double r_lo = node.number_or("r_min", maximal ? 1e-6 * limit : 0.0);
  const double r_hi = node.number_or("r_max", maximal ? 0.999 * limit : 0.95 * limit);
  if (!(r_lo >= 0.0 && r_hi > r_lo && r_hi < limit)) {
    throw ConfigError(node.path() + ": need 0 <= r_min < r_max < " + format_double(limit));
  }
  return [=] {
    const auto pts = random_annulus_points(c.seed, samples, d.center, r_lo, r_hi);
    const auto v = maximal ? maximality_check(metric, alpha, R, pts, spot) : ahlfors_check(metric, pts, spot);
    Json w = verdict_witness(v);
    w["samples"] = samples;
    w["margin"] = number_json(v.margin);
    // Measured value counts failed conditions; any violation or refusal is one.
    return Records{scalar_record(c, {0.0}, {v.pass ? 0.0 : 1.0}, 0.0, v.pass, w)};
  };
}

Task parse_check(const ConfigNode& node, CheckContext& c) {
  if (c.tag == "derivative-rates" || c.tag == "corner-rates" || c.tag == "cusp-pure-rates" ||
      c.tag == "cusp-mixed-rates") {
    return parse_rate(node, c);
  }
  if (c.tag == "minda") return parse_minda(node, c);
  if (c.tag == "cusp-limits") return parse_cusp_limits(node, c);
  if (c.tag == "u-limits") return parse_u_limits(node, c);
  if (c.tag == "l-table") return parse_l_table(node, c);
  if (c.tag == "corner-bound") return parse_corner_bound(node, c);
  if (c.tag == "delta-bound") return parse_delta(node, c);
  if (c.tag == "ahlfors") return parse_domination(node, c, false);
  if (c.tag == "maximality") return parse_domination(node, c, true);
  std::string valid;
  for (const auto& t : verify_tags()) valid += (valid.empty() ? "" : ", ") + t;
  throw ConfigError(node.path() + ".tag: unknown theorem_tag '" + c.tag + "' (valid: " + valid + ")");
}

}  // namespace

const std::vector<std::string>& verify_tags() {
  static const std::vector<std::string> tags = {
      "derivative-rates", "corner-rates",  "cusp-pure-rates", "cusp-mixed-rates", "minda",   "cusp-limits",
      "u-limits",         "l-table",       "corner-bound",    "delta-bound",      "ahlfors", "maximality"};
  return tags;
}

RunResult run_verify(const Json& config, const RunOptions& opt) {
  const ConfigNode root(config, "");
  const std::uint64_t seed = seed_of(root, opt);
  std::vector<Task> tasks;
  std::vector<CheckContext> contexts;
  const auto checks = root.children("checks");
  if (checks.empty()) throw ConfigError("checks: at least one check is required");
  for (std::size_t i = 0; i < checks.size(); ++i) {
    const auto& node = checks[i];
    CheckContext c;
    c.tag = node.string("tag");
    c.id = node.string_or("id", c.tag + "#" + std::to_string(i));
    c.seed = seed + i;
    c.expect_pass = node.boolean_or("expect_pass", true);
    tasks.push_back(parse_check(node, c));
    node.finish();
    contexts.push_back(c);
  }
  root.finish();

  std::vector<Records> results(tasks.size());
  std::vector<std::string> errors(tasks.size());
  auto run_one = [&](std::size_t i) {
    try {
      results[i] = tasks[i]();
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  };
  const int jobs = std::max(1, opt.jobs);
  if (jobs == 1 || tasks.size() == 1) {
    for (std::size_t i = 0; i < tasks.size(); ++i) run_one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < std::min<int>(jobs, static_cast<int>(tasks.size())); ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) run_one(i);
      });
    }
    for (auto& th : pool) th.join();
  }

  RunResult out;
  bool any_fail = false;
  bool any_error = false;
  std::ostringstream lines;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const auto& c = contexts[i];
    if (!errors[i].empty()) {
      VerdictRecord r;
      r.check_id = c.id;
      r.theorem_tag = c.tag;
      r.tolerance = std::nan("");
      r.status = "error";
      r.witness = Json{{"error", errors[i]}};
      lines << to_json(r).dump() << '\n';
      any_error = true;
      continue;
    }
    for (auto& r : results[i]) {
      if (!c.expect_pass) {
        if (r.witness.is_null()) r.witness = Json::object();
        r.witness["expect_pass"] = false;
        r.witness["raw_pass"] = r.pass;
        r.pass = !r.pass;
      }
      r.status = r.pass ? "pass" : "fail";
      any_fail = any_fail || !r.pass;
      lines << to_json(r).dump() << '\n';
    }
  }
  out.output = lines.str();
  out.exit_code = any_error ? kRuntimeError : (any_fail ? kFail : kPass);
  if (opt.out_dir) write_file(*opt.out_dir, "verdicts.jsonl", out.output);
  return out;
}

// ---------------------------------------------------------------- metric-eval

RunResult run_metric_eval(const Json& config, const RunOptions& opt) {
  const ConfigNode root(config, "");
  const auto metric = parse_metric(root.child("metric"));
  const auto sample = root.child("sample");
  const auto step = root.optional_number("curvature_step");
  const int order = root.integer_or("curvature_order", 4);
  seed_of(root, opt);
  std::vector<ComplexPoint> points;
  const auto center = metric.domain().center;
  if (sample.has("points")) {
    const auto& arr = sample.raw("points");
    if (!arr.is_array()) throw ConfigError("sample.points: expected an array of [re, im] pairs");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const auto& p = arr[i];
      if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
        throw ConfigError("sample.points[" + std::to_string(i) + "]: expected [re, im]");
      }
      try {
        points.emplace_back(p[0].get<double>(), p[1].get<double>());
      } catch (const DomainError& e) {
        throw ConfigError("sample.points[" + std::to_string(i) + "]: " + e.what());
      }
    }
  }
  if (sample.has("radii")) {
    const auto radii = sample.numbers("radii");
    const int angles = sample.integer_or("angles", 1);
    if (angles < 1) throw ConfigError("sample.angles: must be >= 1");
    for (double r : radii) {
      for (int a = 0; a < angles; ++a) points.push_back(center + ComplexPoint::polar(r, 2.0 * M_PI * a / angles));
    }
  } else if (sample.has("angles")) {
    throw ConfigError("sample.angles: only valid together with sample.radii");
  }
  sample.finish();
  root.finish();
  if (points.empty()) throw ConfigError("sample: empty sample plan");
  if (step && !(*step > 0.0)) throw ConfigError("curvature_step: must be positive");
  if (order != 2 && order != 4) throw ConfigError("curvature_order: must be 2 or 4");

  std::ostringstream csv;
  csv << "re,im,density,numeric_curvature,status" << kCrlf;
  bool row_error = false;
  for (const auto& z : points) {
    csv << format_double(z.re()) << ',' << format_double(z.im()) << ',';
    try {
      const double lam = metric(z);
      const double k = numeric_curvature(metric, z, step ? *step : default_curvature_step(metric, z, order), order);
      csv << format_double(lam) << ',' << format_double(k) << ",ok" << kCrlf;
    } catch (const Error& e) {
      row_error = true;
      csv << ",," << csv_field(std::string("error: ") + e.what()) << kCrlf;
    }
  }
  RunResult out{csv.str(), row_error ? kConfigError : kPass};
  if (opt.out_dir) write_file(*opt.out_dir, "metric.csv", out.output);
  return out;
}

// ---------------------------------------------------------------- solve

RunResult run_solve(const Json& config, const RunOptions& opt) {
  const ConfigNode root(config, "");
  seed_of(root, opt);
  const auto gnode = root.child("grid");
  std::optional<AnnularGrid> grid;
  try {
    grid = AnnularGrid::build(gnode.number("r_min"), gnode.number("r_max"), gnode.integer("nr"),
                              gnode.integer("ntheta"));
  } catch (const ParameterError& e) {
    throw ConfigError(std::string("grid: ") + e.what());
  }
  gnode.finish();

  const auto knode = root.child("kappa");
  const std::string kkind = knode.string_or("kind", "constant");
  CurvatureField kappa;
  if (kkind == "constant") {
    kappa = CurvatureField::constant(knode.number("value"));
  } else if (kkind == "radial_linear") {
    const double value = knode.number("value");
    const double slope = knode.number("slope");
    kappa.eval = [value, slope](ComplexPoint z) { return value * (1.0 + slope * z.abs()); };
    kappa.kappa0 = value;
  } else {
    throw ConfigError("kappa.kind: expected 'constant' or 'radial_linear', got '" + kkind + "'");
  }
  knode.finish();
  for (int i = 0; i < grid->nr(); ++i) {
    for (int j = 0; j < grid->ntheta(); ++j) {
      const double k = kappa.eval(grid->point(i, j));
      if (!(k < 0.0)) {
        throw ConfigError("kappa: curvature must be negative on the grid; kappa = " + format_double(k) + " at |z| = " +
                          format_double(grid->radius(i)));
      }
    }
  }

  const auto bnode = root.child("boundary");
  const std::string bkind = bnode.string("kind");
  DirichletData boundary;
  if (bkind == "metric") {
    const auto m = parse_metric(bnode.child("metric"));
    boundary = DirichletData::from_field(m.log_field());
  } else if (bkind == "constant") {
    const double inner = bnode.number("inner");
    const double outer = bnode.number("outer");
    boundary = {[inner](ComplexPoint) { return inner; }, [outer](ComplexPoint) { return outer; }};
  } else {
    throw ConfigError("boundary.kind: expected 'metric' or 'constant', got '" + bkind + "'");
  }
  bnode.finish();

  SolverConfig scfg;
  if (root.has("solver")) {
    const auto s = root.child("solver");
    scfg.tol = s.number_or("tol", scfg.tol);
    scfg.max_iter = s.integer_or("max_iter", scfg.max_iter);
    scfg.damping = s.number_or("damping", scfg.damping);
    scfg.max_backtracks = s.integer_or("max_backtracks", scfg.max_backtracks);
    scfg.radial_order = s.integer_or("radial_order", scfg.radial_order);
    s.finish();
  }
  std::optional<MetricField> oracle;
  double oracle_tol = 1e-4;
  if (root.has("manufactured")) {
    const auto m = root.child("manufactured");
    oracle = parse_metric(m.child("metric"));
    oracle_tol = m.number_or("tolerance", oracle_tol);
    m.finish();
  }
  root.finish();

  RunResult out;
  std::ostringstream lines;
  Json summary;
  summary["grid"] = Json{{"r_min", number_json(grid->r_min())},
                         {"r_max", number_json(grid->r_max())},
                         {"nr", grid->nr()},
                         {"ntheta", grid->ntheta()}};
  try {
    const auto sol = solve_curvature(kappa, boundary, *grid, scfg);
    summary["status"] = "converged";
    summary["residual"] = number_json(sol.residual_norm);
    summary["iters"] = sol.newton_iters;
    Json hist = Json::array();
    for (double h : sol.history) hist.push_back(number_json(h));
    summary["history"] = hist;
    lines << summary.dump() << '\n';
    if (opt.out_dir) {
      std::ostringstream csv;
      csv << "r,theta,u" << kCrlf;
      for (int i = 0; i < grid->nr(); ++i) {
        for (int j = 0; j < grid->ntheta(); ++j) {
          csv << format_double(grid->radius(i)) << ',' << format_double(grid->angle(j)) << ','
              << format_double(sol.u[grid->index(i, j)]) << kCrlf;
        }
      }
      write_file(*opt.out_dir, "u.csv", csv.str());
      write_file(*opt.out_dir, "summary.json", summary.dump(2) + "\n");
    }
    out.exit_code = kPass;
    if (oracle) {
      double err = 0.0;
      ComplexPoint worst;
      for (int i = 0; i < grid->nr(); ++i) {
        for (int j = 0; j < grid->ntheta(); ++j) {
          const auto z = grid->point(i, j);
          const double e = std::abs(sol.u[grid->index(i, j)] - oracle->log_density(z));
          if (e > err) {
            err = e;
            worst = z;
          }
        }
      }
      VerdictRecord r;
      r.check_id = "manufactured-sup-error";
      r.theorem_tag = "solver";
      r.expected = {0.0};
      r.measured = {err};
      r.tolerance = oracle_tol;
      r.pass = err <= oracle_tol;
      r.status = r.pass ? "pass" : "fail";
      r.witness = Json{{"point", point_json(worst)}};
      lines << to_json(r).dump() << '\n';
      if (!r.pass) out.exit_code = kFail;
    }
  } catch (const Error& e) {
    VerdictRecord r;
    r.check_id = "solve";
    r.theorem_tag = "solver";
    r.tolerance = scfg.tol;
    r.status = "error";
    r.witness = Json{{"error", e.what()}};
    if (const auto* ce = dynamic_cast<const ConvergenceError*>(&e)) {
      Json trace = Json::array();
      for (double t : ce->trace()) trace.push_back(number_json(t));
      r.witness["trace"] = trace;
    }
    lines << to_json(r).dump() << '\n';
    out.exit_code = kRuntimeError;
  }
  out.output = lines.str();
  if (opt.out_dir) write_file(*opt.out_dir, "verdicts.jsonl", out.output);
  return out;
}

// ---------------------------------------------------------------- bounds

RunResult run_bounds(const Json& config, const RunOptions& opt) {
  const ConfigNode root(config, "");
  seed_of(root, opt);
  std::vector<std::function<Json()>> jobs;
  if (root.has("gamma")) {
    for (double x : root.numbers("gamma")) {
      jobs.push_back([x] { return Json{{"quantity", "gamma"}, {"x", number_json(x)}, {"value", number_json(gamma_fn(x))}}; });
    }
  }
  if (root.has("binom")) {
    for (const auto& n : root.children("binom")) {
      const double tau = n.number("tau");
      const int j = n.integer("j");
      if (j < 0) throw ConfigError(n.path() + ".j: must be >= 0");
      n.finish();
      jobs.push_back([tau, j] {
        return Json{{"quantity", "binom"}, {"tau", number_json(tau)}, {"j", j}, {"value", number_json(binom_general(tau, j))}};
      });
    }
  }
  if (root.has("delta")) {
    for (const auto& n : root.children("delta")) {
      const double a = n.number("alpha"), b = n.number("beta"), g = n.number("gamma");
      const std::string site = n.string_or("site", "zero");
      n.finish();
      PunctureSite s;
      if (site == "zero") s = PunctureSite::zero;
      else if (site == "one") s = PunctureSite::one;
      else if (site == "infinity") s = PunctureSite::infinity;
      else throw ConfigError(n.path() + ".site: expected zero, one or infinity");
      std::optional<ThreePunctureParams> p;
      try {
        p = ThreePunctureParams(a, b, g).at(s);
      } catch (const ParameterError& e) {
        throw ConfigError(n.path() + ": " + e.what());
      }
      const auto params = *p;
      jobs.push_back([params, site] {
        const auto d = delta_three_puncture(params);
        return Json{{"quantity", "delta"},
                    {"site", site},
                    {"alpha", number_json(params.alpha())},
                    {"beta", number_json(params.beta())},
                    {"gamma", number_json(params.gamma())},
                    {"delta", number_json(d.delta)},
                    {"bound", number_json(d.bound)}};
      });
    }
  }
  root.finish();
  if (jobs.empty()) throw ConfigError("bounds: nothing to evaluate (expected gamma, binom or delta)");
  RunResult out;
  std::ostringstream lines;
  for (const auto& job : jobs) {
    try {
      Json j = job();
      j["status"] = "ok";
      lines << j.dump() << '\n';
    } catch (const Error& e) {
      lines << Json{{"status", "error"}, {"error", e.what()}}.dump() << '\n';
      out.exit_code = kRuntimeError;
    }
  }
  out.output = lines.str();
  if (opt.out_dir) write_file(*opt.out_dir, "bounds.jsonl", out.output);
  return out;
}

}  // namespace conformal::cli
