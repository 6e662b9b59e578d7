#include "fom/cli/trace_io.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "fom/errors.hpp"
#include "json.hpp"

namespace fom::cli {
namespace {

using nlohmann::json;

void put(std::ostream& os, const std::optional<double>& v) {
  if (v) os << format_double(*v);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s, std::size_t line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ConfigError("trace line " + std::to_string(line) + ": bad number '" + s + "'");
  return v;
}

std::optional<double> parse_optional(const std::string& s, std::size_t line) {
  if (s.empty()) return std::nullopt;
  return parse_double(s, line);
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> optional_number(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_trace_csv(std::ostream& os, const Trace& trace) {
  os << kTraceHeader << '\n';
  for (const TraceRow& r : trace.rows) {
    os << r.k << ',' << format_double(r.t) << ',' << format_double(r.theta) << ',' << format_double(r.primal) << ','
       << format_double(r.dual_surrogate) << ',' << format_double(r.gap) << ',' << format_double(r.delta) << ','
       << format_double(r.thm1_residual) << ',' << format_double(r.thm2_residual) << ',';
    put(os, r.bound);
    os << ',';
    put(os, r.cggap);
    os << '\n';
  }
}

std::vector<TraceRow> read_trace_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kTraceHeader) throw ConfigError("trace: missing or unexpected header");
  std::vector<TraceRow> rows;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 11) throw ConfigError("trace line " + std::to_string(lineno) + ": expected 11 fields");
    TraceRow r;
    r.k = static_cast<std::size_t>(parse_double(f[0], lineno));
    r.t = parse_double(f[1], lineno);
    r.theta = parse_double(f[2], lineno);
    r.primal = parse_double(f[3], lineno);
    r.dual_surrogate = parse_double(f[4], lineno);
    r.gap = parse_double(f[5], lineno);
    r.delta = parse_double(f[6], lineno);
    r.thm1_residual = parse_double(f[7], lineno);
    r.thm2_residual = parse_double(f[8], lineno);
    r.bound = parse_optional(f[9], lineno);
    r.cggap = parse_optional(f[10], lineno);
    rows.push_back(r);
  }
  return rows;
}

Summary make_summary(const Trace& trace, double wall_time_ms) {
  Summary s;
  if (!trace.rows.empty()) {
    s.final_gap = trace.rows.back().gap;
    s.final_primal = trace.rows.back().primal;
  }
  s.iterations = trace.rows.size();
  s.wall_time_ms = wall_time_ms;
  s.violations = trace.violations;
  s.violation_count = trace.violation_count;
  s.method = trace.method;
  s.instance = trace.instance;
  s.optimum = trace.optimum;
  s.theory_exponent = trace.theory_exponent;
  return s;
}

std::string summary_to_json(const Summary& s) {
  json j;
  j["final_gap"] = s.final_gap;
  j["final_primal"] = s.final_primal;
  j["iterations"] = s.iterations;
  j["wall_time_ms"] = s.wall_time_ms;
  j["violations"] = s.violations;
  j["violation_count"] = s.violation_count;
  j["method"] = s.method;
  j["instance"] = s.instance;
  j["optimum"] = optional_json(s.optimum);
  j["theory_exponent"] = optional_json(s.theory_exponent);
  return j.dump(2) + "\n";
}

Summary summary_from_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    Summary s;
    s.final_gap = j.value("final_gap", 0.0);
    s.final_primal = j.value("final_primal", 0.0);
    s.iterations = j.value("iterations", std::size_t{0});
    s.wall_time_ms = j.value("wall_time_ms", 0.0);
    if (j.contains("violations")) s.violations = j.at("violations").get<std::vector<std::string>>();
    s.violation_count = j.value("violation_count", s.violations.size());
    s.method = j.value("method", std::string());
    s.instance = j.value("instance", std::string());
    s.optimum = optional_number(j, "optimum");
    s.theory_exponent = optional_number(j, "theory_exponent");
    return s;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("summary: ") + e.what());
  }
}

}  // namespace fom::cli
