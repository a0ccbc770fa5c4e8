#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "conformal/cli.hpp"

namespace conformal::cli {

ConfigNode::ConfigNode(const Json& value, std::string path) : value_(&value), path_(std::move(path)) {
  if (!value.is_object()) {
    throw ConfigError((path_.empty() ? std::string("config") : path_) + ": expected an object");
  }
}

bool ConfigNode::has(const std::string& key) const {
  if (!value_->contains(key)) return false;
  if (std::find(used_.begin(), used_.end(), key) == used_.end()) used_.push_back(key);
  return true;
}

const Json& ConfigNode::at(const std::string& key) const {
  if (!value_->contains(key)) throw ConfigError(field(key) + ": missing required field");
  if (std::find(used_.begin(), used_.end(), key) == used_.end()) used_.push_back(key);
  return (*value_)[key];
}

const Json& ConfigNode::raw(const std::string& key) const { return at(key); }

double ConfigNode::number(const std::string& key) const {
  const auto& v = at(key);
  if (!v.is_number()) throw ConfigError(field(key) + ": expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(field(key) + ": must be finite");
  return x;
}

double ConfigNode::number_or(const std::string& key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

std::optional<double> ConfigNode::optional_number(const std::string& key) const {
  if (!has(key)) return std::nullopt;
  return number(key);
}

int ConfigNode::integer(const std::string& key) const {
  const auto& v = at(key);
  if (!v.is_number_integer()) throw ConfigError(field(key) + ": expected an integer");
  return v.get<int>();
}

int ConfigNode::integer_or(const std::string& key, int fallback) const {
  return has(key) ? integer(key) : fallback;
}

bool ConfigNode::boolean_or(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const auto& v = at(key);
  if (!v.is_boolean()) throw ConfigError(field(key) + ": expected a boolean");
  return v.get<bool>();
}

std::string ConfigNode::string(const std::string& key) const {
  const auto& v = at(key);
  if (!v.is_string()) throw ConfigError(field(key) + ": expected a string");
  return v.get<std::string>();
}

std::string ConfigNode::string_or(const std::string& key, const std::string& fallback) const {
  return has(key) ? string(key) : fallback;
}

std::vector<double> ConfigNode::numbers(const std::string& key) const {
  const auto& v = at(key);
  if (!v.is_array()) throw ConfigError(field(key) + ": expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) throw ConfigError(field(key) + "[" + std::to_string(i) + "]: expected a number");
    out.push_back(v[i].get<double>());
  }
  return out;
}

ConfigNode ConfigNode::child(const std::string& key) const { return ConfigNode(at(key), field(key)); }

std::vector<ConfigNode> ConfigNode::children(const std::string& key) const {
  const auto& v = at(key);
  if (!v.is_array()) throw ConfigError(field(key) + ": expected an array");
  std::vector<ConfigNode> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.emplace_back(v[i], field(key) + "[" + std::to_string(i) + "]");
  return out;
}

void ConfigNode::finish() const {
  std::vector<std::string> unknown;
  for (auto it = value_->begin(); it != value_->end(); ++it) {
    if (std::find(used_.begin(), used_.end(), it.key()) == used_.end()) unknown.push_back(field(it.key()));
  }
  if (unknown.empty()) return;
  std::string msg = "unknown config key";
  msg += unknown.size() > 1 ? "s: " : ": ";
  for (std::size_t i = 0; i < unknown.size(); ++i) msg += (i ? ", " : "") + unknown[i];
  throw ConfigError(msg);
}

Json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
}

void apply_override(Json& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + assignment + "' must look like key=value");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  Json value;
  try {
    value = Json::parse(text);
  } catch (const Json::parse_error&) {
    value = text;
  }
  Json* node = &config;
  std::stringstream parts(key);
  std::string part;
  std::vector<std::string> path;
  while (std::getline(parts, part, '.')) path.push_back(part);
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (path[i].empty()) throw ConfigError("override '" + assignment + "' has an empty path segment");
    if (!node->is_object()) throw ConfigError("override '" + key + "': '" + path[i - 1] + "' is not an object");
    if (i + 1 == path.size()) {
      (*node)[path[i]] = value;
    } else {
      node = &(*node)[path[i]];
      if (node->is_null()) *node = Json::object();
    }
  }
}

MetricField parse_metric(const ConfigNode& node) {
  const std::string kind = node.string("kind");
  auto build = [&]() -> MetricField {
    if (kind == "hyperbolic_disk") return hyperbolic_disk_metric();
    if (kind == "punctured_disk") return punctured_disk_metric();
    if (kind == "lambda_alpha_R") {
      const double alpha = node.number("alpha");
      const double R = node.number_or("R", 1.0);
      try {
        return lambda_alpha_R_metric(LambdaAlphaRParams(alpha, R));
      } catch (const ParameterError& e) {
        throw ConfigError(node.path() + ": " + e.what());
      }
    }
    if (kind == "constant") {
      const double value = node.number("value");
      const double radius = node.number_or("radius", 1.0);
      if (!(value > 0.0) || !(radius > 0.0)) throw ConfigError(node.path() + ": value and radius must be positive");
      return constant_metric(value, PuncturedDisk{{0.0, 0.0}, 0.0, radius, false});
    }
    throw ConfigError(node.path() + ".kind: unknown metric '" + kind +
                      "' (expected hyperbolic_disk, punctured_disk, lambda_alpha_R, constant)");
  };
  MetricField metric = build();
  if (node.has("scale")) {
    const double c = node.number("scale");
    if (!(c > 0.0)) throw ConfigError(node.path() + ".scale: must be positive");
    metric = metric.scaled(c);
  }
  if (node.has("restrict_radius")) {
    const double rho = node.number("restrict_radius");
    auto d = metric.domain();
    if (!(rho > d.inner_radius && rho <= d.outer_radius)) {
      throw ConfigError(node.path() + ".restrict_radius: must lie in the metric's domain");
    }
    d.outer_radius = rho;
    metric = metric.restricted(d);
  }
  node.finish();
  return metric;
}

}  // namespace conformal::cli
