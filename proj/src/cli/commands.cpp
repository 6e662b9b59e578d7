#include "fom/cli/commands.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include "fom/cli/config.hpp"
#include "fom/cli/trace_io.hpp"
#include "fom/errors.hpp"
#include "fom/problems.hpp"

namespace fom::cli {
namespace {

namespace fs = std::filesystem;

struct JobResult {
  int code = kExitOk;
  std::string out;
  std::string err;
};

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot write " + path.string());
  os << content;
}

std::string read_file(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot read " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

JobResult run_one(const fs::path& config_path, const fs::path& out_dir) {
  JobResult r;
  std::ostringstream out, err;
  RunConfig cfg;
  std::optional<ProblemInstance> instance;
  try {
    cfg = load_run_config(config_path);
    instance.emplace(make_instance(cfg.instance));
    resolve_step_rule(cfg, *instance);
    check_compatible(*instance, cfg.method);
  } catch (const Error& e) {
    err << config_path.string() << ": " << e.what() << '\n';
    r.code = kExitConfigError;
    r.err = err.str();
    return r;
  }

  RunOptions options;
  options.tolerance = cfg.tolerance.value_or(default_tolerance());

  Trace trace;
  trace.method = method_name(cfg.method.method);
  trace.instance = instance->name;
  std::optional<std::string> failure;
  const auto start = std::chrono::steady_clock::now();
  try {
    trace = run(*instance, cfg.method, options);
  } catch (const BacktrackFailed& e) {
    failure = std::string("BacktrackFailed: ") + e.what();
  } catch (const NotAdmissible& e) {
    failure = std::string("NotAdmissible: ") + e.what();
  } catch (const DomainError& e) {
    failure = std::string("DomainError: ") + e.what();
  } catch (const Error& e) {
    err << config_path.string() << ": " << e.what() << '\n';
    r.code = kExitConfigError;
    r.err = err.str();
    return r;
  }
  const double wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

  Summary summary = make_summary(trace, wall_ms);
  if (failure) {
    summary.violations.push_back(*failure);
    ++summary.violation_count;
  }

  try {
    fs::create_directories(out_dir);
    std::ostringstream csv;
    write_trace_csv(csv, trace);
    write_file(out_dir / cfg.trace_file, csv.str());
    write_file(out_dir / cfg.summary_file, summary_to_json(summary));
  } catch (const std::exception& e) {
    err << config_path.string() << ": " << e.what() << '\n';
    r.code = kExitConfigError;
    r.err = err.str();
    return r;
  }

  out << summary.instance << ' ' << summary.method << ": " << summary.iterations
      << " iterations, gap " << format_double(summary.final_gap) << ", " << summary.violation_count
      << " violations, " << format_double(std::round(wall_ms * 1000.0) / 1000.0) << " ms\n";
  for (const auto& v : summary.violations) err << "  violation: " << v << '\n';
  r.code = summary.violation_count == 0 ? kExitOk : kExitViolation;
  r.out = out.str();
  r.err = err.str();
  return r;
}

}  // namespace

int cmd_run(const std::vector<fs::path>& configs, const std::optional<fs::path>& out_dir, unsigned jobs,
            std::ostream& out, std::ostream& err) {
  if (configs.empty()) {
    err << "run: no configuration given\n";
    return kExitConfigError;
  }
  const fs::path base = out_dir.value_or(fs::path("."));
  std::vector<fs::path> dirs;
  for (const auto& c : configs) dirs.push_back(configs.size() == 1 ? base : base / c.stem());
  if (configs.size() > 1) {
    auto sorted = dirs;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      err << "run: configuration file stems must be distinct\n";
      return kExitConfigError;
    }
  }

  std::vector<JobResult> results(configs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) results[i] = run_one(configs[i], dirs[i]);
  };
  const unsigned workers = std::clamp<unsigned>(jobs, 1, static_cast<unsigned>(configs.size()));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  }

  int code = kExitOk;
  for (const auto& r : results) {
    out << r.out;
    err << r.err;
    code = std::max(code, r.code);
  }
  return code;
}

int cmd_verify(const std::string& name, std::uint64_t seed, std::size_t samples, double scale, std::ostream& out,
               std::ostream& err) {
  VerifyReport report;
  try {
    if (!(scale > 0.0) || !std::isfinite(scale)) throw ConfigError("scale must be positive");
    if (samples == 0) throw ConfigError("samples must be positive");
    InstanceSpec spec;
    spec.name = name;
    spec.seed = seed;
    ProblemInstance inst = make_instance(spec);
    scale_constants(inst, scale);
    report = verify_constants(inst, samples, seed);
  } catch (const Error& e) {
    err << "verify: " << e.what() << '\n';
    return kExitConfigError;
  }
  if (report.conditions.empty()) out << report.instance << ": no claimed conditions\n";
  for (const auto& c : report.conditions) {
    out << report.instance << ' ' << condition_name(c.condition) << " max_ratio=" << format_double(c.max_ratio)
        << " samples=" << c.samples << ' ' << (c.passed ? "ok" : "VIOLATED") << '\n';
  }
  return report.passed() ? kExitOk : kExitViolation;
}

RateFit fit_rate(const std::vector<double>& k, const std::vector<double>& value, double tail) {
  if (k.size() != value.size()) throw ConfigError("fit_rate: size mismatch");
  if (!(tail > 0.0 && tail <= 1.0)) throw ConfigError("fit_rate: tail must lie in (0, 1]");
  const std::size_t n = k.size();
  const auto take = static_cast<std::size_t>(std::ceil(tail * static_cast<double>(n)));
  std::vector<double> lx, ly;
  for (std::size_t i = n - std::min(n, take); i < n; ++i) {
    if (k[i] > 0.0 && value[i] > 0.0 && std::isfinite(value[i])) {
      lx.push_back(std::log(k[i]));
      ly.push_back(std::log(value[i]));
    }
  }
  if (lx.size() < 10) throw ConfigError("fit_rate: fewer than 10 usable rows");
  const double m = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= m;
  my /= m;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  if (sxx == 0.0) throw ConfigError("fit_rate: degenerate k range");
  return {sxy / sxx, lx.size()};
}

int cmd_rates(const fs::path& trace_path, double tail, std::ostream& out, std::ostream& err) {
  try {
    std::ifstream is(trace_path, std::ios::binary);
    if (!is) throw ConfigError("cannot read " + trace_path.string());
    const auto rows = read_trace_csv(is);

    std::optional<Summary> summary;
    const fs::path summary_path = trace_path.parent_path() / "summary.json";
    if (fs::exists(summary_path)) summary = summary_from_json(read_file(summary_path));
    const std::optional<double> optimum = summary ? summary->optimum : std::nullopt;

    std::vector<double> k, v;
    for (const auto& r : rows) {
      k.push_back(static_cast<double>(r.k));
      v.push_back(optimum ? r.primal - *optimum : r.gap);
    }
    const RateFit fit = fit_rate(k, v, tail);
    out << "slope " << format_double(fit.slope) << " rows " << fit.rows_used << " measure "
        << (optimum ? "suboptimality" : "gap") << '\n';
    if (summary && summary->theory_exponent)
      out << "theory " << format_double(*summary->theory_exponent) << '\n';
    else
      out << "theory unavailable\n";
  } catch (const Error& e) {
    err << "rates: " << e.what() << '\n';
    return kExitConfigError;
  }
  return kExitOk;
}

}  // namespace fom::cli
