#include "fom/cli/config.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>

#include "fom/errors.hpp"
#include "json.hpp"

namespace fom::cli {
namespace {

using nlohmann::json;

void allow_keys(const json& obj, const char* where, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) throw ConfigError(std::string(where) + ": expected an object");
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (const char* k : keys) known = known || key == k;
    if (!known) throw ConfigError(std::string(where) + ": unknown key '" + key + "'");
  }
}

double number(const json& j, const std::string& what) {
  if (!j.is_number()) throw ConfigError(what + ": expected a number");
  return j.get<double>();
}

std::uint64_t unsigned_integer(const json& j, const std::string& what) {
  if (!j.is_number_integer() || j.get<long long>() < 0) throw ConfigError(what + ": expected a non-negative integer");
  return j.get<std::uint64_t>();
}

int integer(const json& j, const std::string& what) {
  if (!j.is_number_integer()) throw ConfigError(what + ": expected an integer");
  return j.get<int>();
}

std::string string(const json& j, const std::string& what) {
  if (!j.is_string()) throw ConfigError(what + ": expected a string");
  return j.get<std::string>();
}

template <typename T, typename F>
void optional_field(const json& obj, const char* key, T& target, F convert) {
  if (obj.contains(key)) target = convert(obj.at(key), key);
}

Vector vector(const json& j, const std::string& what) {
  if (!j.is_array()) throw ConfigError(what + ": expected an array of numbers");
  Vector v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v[i] = number(j[i], what);
  return v;
}

DenseMatrix matrix(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty() || !j[0].is_array() || j[0].empty())
    throw ConfigError(what + ": expected a non-empty array of rows");
  const std::size_t rows = j.size(), cols = j[0].size();
  DenseMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (!j[i].is_array() || j[i].size() != cols) throw ConfigError(what + ": rows must have equal length");
    for (std::size_t c = 0; c < cols; ++c) m(i, c) = number(j[i][c], what);
  }
  return m;
}

DeclaredConstants constants(const json& j) {
  allow_keys(j, "instance.constants", {"L", "M", "nu", "gamma"});
  DeclaredConstants c;
  optional_field(j, "L", c.L, number);
  optional_field(j, "M", c.M, number);
  optional_field(j, "nu", c.nu, number);
  optional_field(j, "gamma", c.gamma, number);
  return c;
}

InstanceSpec instance_spec(const json& j) {
  InstanceSpec spec;
  if (j.is_string()) {
    spec.name = j.get<std::string>();
    return spec;
  }
  allow_keys(j, "instance",
             {"name", "seed", "n", "m", "reference", "lambda", "nu", "radius", "condition", "matrix", "vector",
              "constants"});
  if (!j.contains("name")) throw ConfigError("instance: missing 'name'");
  spec.name = string(j.at("name"), "instance.name");
  optional_field(j, "seed", spec.seed, unsigned_integer);
  if (j.contains("n")) spec.n = unsigned_integer(j.at("n"), "instance.n");
  if (j.contains("m")) spec.m = unsigned_integer(j.at("m"), "instance.m");
  if (j.contains("reference")) {
    const std::string name = string(j.at("reference"), "instance.reference");
    spec.reference = parse_reference_kind(name);
    if (!spec.reference) throw ConfigError("instance.reference: unknown reference function '" + name + "'");
  }
  optional_field(j, "lambda", spec.lambda, number);
  optional_field(j, "nu", spec.nu, number);
  optional_field(j, "radius", spec.radius, number);
  optional_field(j, "condition", spec.condition, number);
  if (j.contains("matrix")) spec.matrix = matrix(j.at("matrix"), "instance.matrix");
  if (j.contains("vector")) spec.vector = vector(j.at("vector"), "instance.vector");
  if (j.contains("constants")) spec.overrides = constants(j.at("constants"));
  return spec;
}

BacktrackSmooth backtrack_rule(const json& j) {
  allow_keys(j, "method.rule", {"kind", "r", "t_init", "max_halvings", "max_growth"});
  BacktrackSmooth b;
  optional_field(j, "r", b.r, number);
  optional_field(j, "t_init", b.t_init, number);
  optional_field(j, "max_halvings", b.max_halvings, integer);
  optional_field(j, "max_growth", b.max_growth, integer);
  return b;
}

StepRule primal_rule(const json& j) {
  if (!j.is_object()) throw ConfigError("method.rule: expected an object");
  const std::string kind = j.contains("kind") ? string(j.at("kind"), "method.rule.kind") : "backtrack";
  if (kind == "backtrack") return backtrack_rule(j);
  if (kind == "fixed") {
    allow_keys(j, "method.rule", {"kind", "t", "t_times_L"});
    if (j.contains("t") == j.contains("t_times_L"))
      throw ConfigError("method.rule: fixed rule needs exactly one of 't' and 't_times_L'");
    // t_times_L is resolved against the instance in resolve_step_rule.
    if (j.contains("t_times_L")) return FixedT{number(j.at("t_times_L"), "method.rule.t_times_L")};
    return FixedT{number(j.at("t"), "method.rule.t")};
  }
  if (kind == "schedule") {
    allow_keys(j, "method.rule", {"kind", "t"});
    if (!j.contains("t")) throw ConfigError("method.rule: schedule rule needs 't'");
    return FixedScheduleT{vector(j.at("t"), "method.rule.t").values()};
  }
  throw ConfigError("method.rule: unknown kind '" + kind + "'");
}

Method method(const json& j) {
  if (j.is_string()) {
    const std::string name = j.get<std::string>();
    if (name == "conditional-subgradient") return ConditionalSubgradient{};
    if (name == "prox-gradient") return ProxGradient{};
    if (name == "prox-subgradient") return ProxSubgradient{};
    if (name == "fast-gradient") return FastGradient{};
    if (name == "universal-gradient") return UniversalGradient{};
    throw ConfigError("method: unknown method '" + name + "'");
  }
  if (!j.is_object() || !j.contains("name")) throw ConfigError("method: expected a name or an object with 'name'");
  const std::string name = string(j.at("name"), "method.name");
  if (name == "conditional-subgradient") {
    allow_keys(j, "method", {"name", "nu", "schedule", "max_iters", "interval_tol"});
    ConditionalSubgradient m;
    optional_field(j, "nu", m.nu, number);
    if (j.contains("schedule")) {
      const std::string s = string(j.at("schedule"), "method.schedule");
      if (s == "theta") m.schedule = CGSchedule::Theta;
      else if (s == "linesearch") m.schedule = CGSchedule::LineSearch;
      else throw ConfigError("method.schedule: expected 'theta' or 'linesearch'");
    }
    optional_field(j, "max_iters", m.line_search.max_iters, integer);
    optional_field(j, "interval_tol", m.line_search.interval_tol, number);
    return m;
  }
  if (name == "prox-gradient") {
    allow_keys(j, "method", {"name", "rule"});
    ProxGradient m;
    if (j.contains("rule")) m.rule = primal_rule(j.at("rule"));
    return m;
  }
  if (name == "prox-subgradient") {
    allow_keys(j, "method", {"name", "C"});
    ProxSubgradient m;
    optional_field(j, "C", m.C, number);
    return m;
  }
  if (name == "fast-gradient") {
    allow_keys(j, "method", {"name", "gamma", "rule"});
    FastGradient m;
    optional_field(j, "gamma", m.gamma, number);
    if (j.contains("rule")) m.rule = primal_rule(j.at("rule"));
    return m;
  }
  if (name == "universal-gradient") {
    allow_keys(j, "method", {"name", "eps", "rule"});
    UniversalGradient m;
    optional_field(j, "eps", m.eps, number);
    if (j.contains("rule")) {
      const StepRule rule = primal_rule(j.at("rule"));
      if (!std::holds_alternative<BacktrackSmooth>(rule))
        throw ConfigError("method.rule: universal-gradient needs a backtracking rule");
      m.rule = std::get<BacktrackSmooth>(rule);
    }
    return m;
  }
  throw ConfigError("method: unknown method '" + name + "'");
}

StepRule& rule_of(Method& m) {
  if (auto* p = std::get_if<ProxGradient>(&m)) return p->rule;
  if (auto* f = std::get_if<FastGradient>(&m)) return f->rule;
  throw ConfigError("method.rule: t_times_L applies to prox-gradient and fast-gradient");
}

}  // namespace

RunConfig parse_run_config(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  allow_keys(j, "config", {"instance", "method", "iterations", "tolerance", "output"});
  if (!j.contains("instance")) throw ConfigError("config: missing 'instance'");
  if (!j.contains("method")) throw ConfigError("config: missing 'method'");

  RunConfig cfg;
  cfg.instance = instance_spec(j.at("instance"));
  cfg.method.method = method(j.at("method"));
  if (j.contains("iterations")) cfg.method.iterations = unsigned_integer(j.at("iterations"), "iterations");
  if (j.contains("tolerance")) {
    cfg.tolerance = number(j.at("tolerance"), "tolerance");
    if (!(*cfg.tolerance > 0.0)) throw ConfigError("tolerance: must be positive");
  }
  {
    const json& m = j.at("method");
    if (m.is_object() && m.contains("rule") && m.at("rule").contains("t_times_L"))
      cfg.fixed_step_times_L = std::get<FixedT>(rule_of(cfg.method.method)).t;
  }
  if (j.contains("output")) {
    const json& o = j.at("output");
    allow_keys(o, "output", {"trace", "summary"});
    optional_field(o, "trace", cfg.trace_file, string);
    optional_field(o, "summary", cfg.summary_file, string);
  }
  return cfg;
}

void resolve_step_rule(RunConfig& config, const ProblemInstance& instance) {
  if (!config.fixed_step_times_L) return;
  if (!instance.constants.L) throw ConfigError("method.rule: t_times_L needs an instance with a declared L");
  std::get<FixedT>(rule_of(config.method.method)).t = *config.fixed_step_times_L / *instance.constants.L;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_run_config(text.str());
}

}  // namespace fom::cli
