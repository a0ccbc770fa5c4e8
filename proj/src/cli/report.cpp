#include <charconv>
#include <cmath>

#include "conformal/cli.hpp"

namespace conformal::cli {

Json number_json(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

namespace {

Json numbers_json(const std::vector<double>& xs) {
  if (xs.size() == 1) return number_json(xs.front());
  Json arr = Json::array();
  for (double x : xs) arr.push_back(number_json(x));
  return arr;
}

}  // namespace

Json to_json(const VerdictRecord& r) {
  Json j;
  j["check_id"] = r.check_id;
  j["theorem_tag"] = r.theorem_tag;
  j["expected"] = numbers_json(r.expected);
  j["measured"] = numbers_json(r.measured);
  j["tolerance"] = number_json(r.tolerance);
  j["pass"] = r.pass;
  j["status"] = r.status;
  if (!r.witness.is_null()) j["witness"] = r.witness;
  return j;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace conformal::cli
