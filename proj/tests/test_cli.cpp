#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "fom/cli/commands.hpp"
#include "fom/cli/config.hpp"
#include "fom/cli/trace_io.hpp"
#include "fom/errors.hpp"
#include "json.hpp"

using namespace fom;
using namespace fom::cli;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("fom-test-" + tag + "-" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

fs::path write(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_config(const TempDir& dir, const std::string& name, const std::string& json, fs::path* out_dir = nullptr) {
  const fs::path cfg = write(dir.path / (name + ".json"), json);
  const fs::path out = dir.path / name;
  if (out_dir) *out_dir = out;
  std::ostringstream o, e;
  return cmd_run({cfg}, out, 1, o, e);
}

std::vector<TraceRow> read_rows(const fs::path& p) {
  std::ifstream in(p);
  return read_trace_csv(in);
}

}  // namespace

TEST_CASE("config parsing") {
  SUBCASE("string shorthands") {
    const RunConfig c = parse_run_config(R"({"instance": "lasso", "method": "fast-gradient", "iterations": 7})");
    CHECK(c.instance.name == "lasso");
    CHECK(std::holds_alternative<FastGradient>(c.method.method));
    CHECK(c.method.iterations == 7);
    CHECK_FALSE(c.tolerance.has_value());
    CHECK(c.trace_file == "trace.csv");
  }
  SUBCASE("full objects") {
    const RunConfig c = parse_run_config(R"({
      "instance": {"name": "simplex-quadratic", "seed": 3, "n": 4, "reference": "euclidean",
                   "constants": {"L": 2.5}},
      "method": {"name": "prox-gradient", "rule": {"kind": "backtrack", "r": 3, "t_init": 0.5}},
      "tolerance": 1e-9,
      "output": {"trace": "t.csv", "summary": "s.json"}})");
    CHECK(c.instance.seed == 3);
    CHECK(*c.instance.n == 4);
    CHECK(*c.instance.reference == ReferenceKind::SquaredEuclidean);
    CHECK(*c.instance.overrides.L == 2.5);
    const auto& rule = std::get<BacktrackSmooth>(std::get<ProxGradient>(c.method.method).rule);
    CHECK(rule.r == 3.0);
    CHECK(rule.t_init == 0.5);
    CHECK(*c.tolerance == 1e-9);
    CHECK(c.trace_file == "t.csv");
    CHECK(c.summary_file == "s.json");
  }
  SUBCASE("conditional gradient options") {
    const RunConfig c = parse_run_config(
        R"({"instance": "cg-ball", "method": {"name": "conditional-subgradient", "nu": 0.5, "schedule": "linesearch"}})");
    const auto& m = std::get<ConditionalSubgradient>(c.method.method);
    CHECK(m.nu == 0.5);
    CHECK(m.schedule == CGSchedule::LineSearch);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(parse_run_config("{"), ConfigError);
    CHECK_THROWS_AS(parse_run_config(R"({"instance": "lasso"})"), ConfigError);
    CHECK_THROWS_AS(parse_run_config(R"({"instance": "lasso", "method": "newton"})"), ConfigError);
    CHECK_THROWS_AS(parse_run_config(R"({"instance": "lasso", "method": "fast-gradient", "extra": 1})"), ConfigError);
    CHECK_THROWS_AS(parse_run_config(R"({"instance": {"name": "lasso", "size": 3}, "method": "prox-gradient"})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_run_config(R"({"instance": "lasso", "method": "prox-gradient", "iterations": -1})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_run_config(R"({"instance": "lasso", "method": "prox-gradient", "iterations": "many"})"),
                    ConfigError);
    CHECK_THROWS_AS(
        parse_run_config(R"({"instance": "lasso", "method": {"name": "prox-gradient", "rule": {"kind": "fixed"}}})"),
        ConfigError);
  }
}

TEST_CASE("shortest round-trip formatting") {
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(-2.5e-300) == "-2.5e-300");
  for (double v : {1.0 / 3.0, 2.0 / 3.0, 1e-17, 123456.789, -0.0}) CHECK(std::stod(format_double(v)) == v);
}

TEST_CASE("trace csv round trip") {
  Trace tr;
  TraceRow a;
  a.k = 1;
  a.t = 0.5;
  a.theta = 1.0;
  a.primal = 1.0 / 3.0;
  a.gap = -1e-3;
  a.bound = 2.0;
  TraceRow b = a;
  b.k = 2;
  b.bound.reset();
  b.cggap = 0.25;
  tr.rows = {a, b};
  std::ostringstream os;
  write_trace_csv(os, tr);
  const std::string text = os.str();
  CHECK(text.substr(0, text.find('\n')) == kTraceHeader);
  CHECK(text.find("2,0.5,1,0.3333333333333333,") != std::string::npos);
  std::istringstream is(text);
  const auto rows = read_trace_csv(is);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].primal == a.primal);
  CHECK(*rows[0].bound == 2.0);
  CHECK_FALSE(rows[0].cggap.has_value());
  CHECK_FALSE(rows[1].bound.has_value());
  CHECK(*rows[1].cggap == 0.25);

  std::istringstream bad("k,t\n1,2\n");
  CHECK_THROWS_AS(read_trace_csv(bad), ConfigError);
}

TEST_CASE("summary json round trip") {
  Summary s;
  s.final_gap = 1e-5;
  s.final_primal = 0.25;
  s.iterations = 10;
  s.wall_time_ms = 3.5;
  s.violations = {"k=3: something"};
  s.violation_count = 1;
  s.method = "fast-gradient";
  s.instance = "lasso";
  s.optimum = 0.125;
  const std::string text = summary_to_json(s);
  const auto j = nlohmann::json::parse(text);
  for (const char* key : {"final_gap", "final_primal", "iterations", "wall_time_ms", "violations"})
    CHECK(j.contains(key));
  CHECK(j.at("theory_exponent").is_null());
  const Summary back = summary_from_json(text);
  CHECK(back.final_gap == s.final_gap);
  CHECK(back.violations == s.violations);
  CHECK(*back.optimum == 0.125);
  CHECK_FALSE(back.theory_exponent.has_value());
}

TEST_CASE("run: smoke, incompatible pair, fault injection") {
  TempDir dir("run");
  fs::path out;
  SUBCASE("lasso with prox gradient") {
    CHECK(run_config(dir, "smoke", R"({"instance": "lasso", "method": "prox-gradient", "iterations": 100})", &out) ==
          kExitOk);
    CHECK(read_rows(out / "trace.csv").size() == 100);
    const Summary s = summary_from_json(slurp(out / "summary.json"));
    CHECK(s.iterations == 100);
    CHECK(s.violations.empty());
  }
  SUBCASE("zero reference with prox gradient is a configuration error") {
    CHECK(run_config(dir, "bad",
                     R"({"instance": {"name": "simplex-quadratic", "reference": "zero"}, "method": "prox-gradient"})",
                     &out) == kExitConfigError);
    CHECK_FALSE(fs::exists(out / "trace.csv"));
  }
  SUBCASE("unreadable config") {
    std::ostringstream o, e;
    CHECK(cmd_run({dir.path / "missing.json"}, dir.path, 1, o, e) == kExitConfigError);
  }
  SUBCASE("L ten times too small drives a 1/L step into a violation") {
    CHECK(run_config(dir, "fault",
                     R"({"instance": {"name": "lasso", "constants": {"L": 0.1}},
                         "method": {"name": "prox-gradient", "rule": {"kind": "fixed", "t_times_L": 1}},
                         "iterations": 500})",
                     &out) == kExitViolation);
    const Summary s = summary_from_json(slurp(out / "summary.json"));
    CHECK(s.violation_count > 0);
    CHECK_FALSE(s.violations.empty());
  }
  SUBCASE("the same 1/L step with the declared L is clean") {
    CHECK(run_config(dir, "clean",
                     R"({"instance": "lasso",
                         "method": {"name": "prox-gradient", "rule": {"kind": "fixed", "t_times_L": 1}},
                         "iterations": 500})",
                     &out) == kExitOk);
  }
  SUBCASE("a too-small curvature constant is a bound violation") {
    CHECK(run_config(dir, "curv",
                     R"({"instance": {"name": "cg-ball", "constants": {"M": 0.004}},
                         "method": "conditional-subgradient", "iterations": 200})",
                     &out) == kExitViolation);
  }
}

TEST_CASE("run output is bit-stable") {
  TempDir dir("stable");
  const std::string cfg = R"({"instance": "simplex-quadratic", "method": "fast-gradient", "iterations": 300})";
  fs::path a, b;
  REQUIRE(run_config(dir, "a", cfg, &a) == kExitOk);
  REQUIRE(run_config(dir, "b", cfg, &b) == kExitOk);
  CHECK(slurp(a / "trace.csv") == slurp(b / "trace.csv"));
}

TEST_CASE("batch runs isolate outputs and match sequential runs") {
  TempDir dir("batch");
  const auto c1 = write(dir.path / "one.json", R"({"instance": "lasso", "method": "fast-gradient", "iterations": 50})");
  const auto c2 = write(dir.path / "two.json", R"({"instance": "holder", "method": "universal-gradient", "iterations": 50})");
  const auto c3 = write(dir.path / "three.json", R"({"instance": "cg-ball", "method": "conditional-subgradient", "iterations": 50})");
  std::ostringstream o1, e1, o2, e2;
  REQUIRE(cmd_run({c1, c2, c3}, dir.path / "par", 3, o1, e1) == kExitOk);
  REQUIRE(cmd_run({c1, c2, c3}, dir.path / "seq", 1, o2, e2) == kExitOk);
  for (const char* stem : {"one", "two", "three"}) {
    CHECK(slurp(dir.path / "par" / stem / "trace.csv") == slurp(dir.path / "seq" / stem / "trace.csv"));
  }
  // Reports come back in config order regardless of scheduling.
  auto strip_times = [](std::string s) {
    std::string out;
    std::istringstream is(s);
    for (std::string line; std::getline(is, line);) out += line.substr(0, line.rfind(',')) + "\n";
    return out;
  };
  CHECK(strip_times(o1.str()) == strip_times(o2.str()));
}

TEST_CASE("verify exit codes") {
  std::ostringstream o, e;
  CHECK(cmd_verify("lasso", 1, 5000, 1.0, o, e) == kExitOk);
  CHECK(cmd_verify("cg-ball", 1, 5000, 1.0, o, e) == kExitOk);
  CHECK(cmd_verify("l1-regression", 1, 5000, 0.5, o, e) == kExitViolation);
  CHECK(cmd_verify("nope", 1, 10, 1.0, o, e) == kExitConfigError);
  CHECK(cmd_verify("lasso", 1, 10, -1.0, o, e) == kExitConfigError);
  CHECK(o.str().find("relative_smooth") != std::string::npos);
}

TEST_CASE("rate fitting") {
  SUBCASE("exact power law") {
    std::vector<double> k, v;
    for (int i = 1; i <= 100; ++i) {
      k.push_back(i);
      v.push_back(3.0 * std::pow(i, -1.5));
    }
    const RateFit fit = fit_rate(k, v, 0.5);
    CHECK(fit.slope == doctest::Approx(-1.5).epsilon(1e-12));
    CHECK(fit.rows_used == 50);
  }
  SUBCASE("too few usable rows") {
    std::vector<double> k{1, 2, 3}, v{1, 0.5, 0.3};
    CHECK_THROWS_AS(fit_rate(k, v, 1.0), ConfigError);
    std::vector<double> kk(40), vv(40, 0.0);
    for (int i = 0; i < 40; ++i) kk[i] = i + 1;
    CHECK_THROWS_AS(fit_rate(kk, vv, 0.5), ConfigError);
  }
}

TEST_CASE("rates on lasso runs") {
  TempDir dir("rates");
  fs::path fast, prox;
  REQUIRE(run_config(dir, "fast", R"({"instance": "lasso", "method": "fast-gradient", "iterations": 2000})", &fast) ==
          kExitOk);
  REQUIRE(run_config(dir, "prox", R"({"instance": "lasso", "method": "prox-gradient", "iterations": 2000})", &prox) ==
          kExitOk);
  std::ostringstream o, e;
  REQUIRE(cmd_rates(fast / "trace.csv", 0.5, o, e) == kExitOk);
  std::istringstream fo(o.str());
  std::string word;
  double slope = 0.0;
  fo >> word >> slope;
  CHECK(word == "slope");
  CHECK(slope <= -1.8);
  CHECK(o.str().find("theory -2") != std::string::npos);

  std::ostringstream o2;
  REQUIRE(cmd_rates(prox / "trace.csv", 0.5, o2, e) == kExitOk);
  std::istringstream po(o2.str());
  po >> word >> slope;
  CHECK(slope <= -0.9);

  const auto rows = read_rows(fast / "trace.csv");
  std::vector<double> k, v;
  const Summary s = summary_from_json(slurp(fast / "summary.json"));
  for (const auto& r : rows) {
    k.push_back(static_cast<double>(r.k));
    v.push_back(r.primal - *s.optimum);
  }
  CHECK(fit_rate(k, v, 0.5).slope == doctest::Approx(slope).epsilon(0.5));

  write(dir.path / "short.csv", std::string(kTraceHeader) + "\n1,1,1,1,1,1,1,0,0,,\n");
  CHECK(cmd_rates(dir.path / "short.csv", 0.5, o, e) == kExitConfigError);
}

TEST_CASE("prox subgradient on l1-regression meets its horizon bound") {
  TempDir dir("subgrad");
  fs::path out;
  REQUIRE(run_config(dir, "sub", R"({"instance": "l1-regression", "method": "prox-subgradient", "iterations": 40000})",
                     &out) == kExitOk);
  const auto rows = read_rows(out / "trace.csv");
  const Summary s = summary_from_json(slurp(out / "summary.json"));
  REQUIRE(rows.size() == 40000);
  REQUIRE(rows.back().bound.has_value());
  CHECK(rows.back().primal - *s.optimum <= *rows.back().bound + 1e-8);
}

TEST_CASE("FOM_TOL overrides the default tolerance") {
  ::setenv("FOM_TOL", "1e-6", 1);
  CHECK(default_tolerance() == 1e-6);
  ::setenv("FOM_TOL", "garbage", 1);
  CHECK(default_tolerance() == 1e-8);
  ::unsetenv("FOM_TOL");
  CHECK(default_tolerance() == 1e-8);
}

TEST_CASE("command-line usage errors") {
  const std::string exe = FOM_CLI_PATH;
  auto status = [&](const std::string& args) {
    const int raw = std::system((exe + " " + args + " >/dev/null 2>&1").c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  CHECK(status("--help") == 0);
  CHECK(status("") == kExitConfigError);
  CHECK(status("run") == kExitConfigError);
  CHECK(status("verify --instance lasso --samples 200") == kExitOk);
  CHECK(status("verify --instance l1-regression --scale 0.5 --samples 2000") == kExitViolation);
  CHECK(status("frobnicate") == kExitConfigError);
}
