#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "conformal/errors.hpp"
#include "conformal/metrics.hpp"
#include "json.hpp"

namespace conformal::cli {

using Json = nlohmann::ordered_json;

/// Invalid configuration; the message names the offending field path.
class ConfigError : public Error {
 public:
  using Error::Error;
};

enum ExitCode : int { kPass = 0, kFail = 1, kConfigError = 2, kRuntimeError = 3 };

/// Read-only view of a config object that records which keys were used, so
/// finish() can reject the rest.
class ConfigNode {
 public:
  ConfigNode(const Json& value, std::string path);

  const std::string& path() const noexcept { return path_; }
  bool has(const std::string& key) const;

  double number(const std::string& key) const;
  double number_or(const std::string& key, double fallback) const;
  std::optional<double> optional_number(const std::string& key) const;
  int integer(const std::string& key) const;
  int integer_or(const std::string& key, int fallback) const;
  bool boolean_or(const std::string& key, bool fallback) const;
  std::string string(const std::string& key) const;
  std::string string_or(const std::string& key, const std::string& fallback) const;
  std::vector<double> numbers(const std::string& key) const;
  ConfigNode child(const std::string& key) const;
  std::vector<ConfigNode> children(const std::string& key) const;
  const Json& raw(const std::string& key) const;

  /// Throws ConfigError listing every key that was never read.
  void finish() const;

 private:
  const Json& at(const std::string& key) const;
  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const Json* value_;
  std::string path_;
  mutable std::vector<std::string> used_;
};

Json load_config(const std::string& path);

/// Applies "a.b.c=value" to config. The value is parsed as JSON when
/// possible, otherwise taken as a string.
void apply_override(Json& config, const std::string& assignment);

/// Metric from {"kind": ..., parameters..., "scale"?, "restrict_radius"?}.
/// Kinds: hyperbolic_disk, punctured_disk, lambda_alpha_R, constant.
MetricField parse_metric(const ConfigNode& node);

struct RunOptions {
  std::optional<std::string> out_dir;
  std::uint64_t seed = 0;
  int jobs = 1;
};

struct RunResult {
  /// Text written to stdout (JSON Lines or CSV).
  std::string output;
  int exit_code = kPass;
};

/// One line of a verdict stream.
struct VerdictRecord {
  std::string check_id;
  std::string theorem_tag;
  std::vector<double> expected;
  std::vector<double> measured;
  double tolerance = 0.0;
  bool pass = false;
  /// "pass", "fail" or "error".
  std::string status;
  Json witness;
};

Json to_json(const VerdictRecord& record);
/// Finite doubles as numbers; NaN and infinities as the strings "nan", "inf", "-inf".
Json number_json(double x);
/// Shortest round-trip decimal.
std::string format_double(double x);
/// RFC 4180 field quoting.
std::string csv_field(const std::string& s);

const std::vector<std::string>& verify_tags();

RunResult run_metric_eval(const Json& config, const RunOptions& opt);
RunResult run_solve(const Json& config, const RunOptions& opt);
RunResult run_verify(const Json& config, const RunOptions& opt);
RunResult run_bounds(const Json& config, const RunOptions& opt);

}  // namespace conformal::cli
