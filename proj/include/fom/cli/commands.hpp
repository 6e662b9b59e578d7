#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace fom::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfigError = 1,
  kExitViolation = 2,
};

/// Runs each configuration and writes its trace and summary. A single config
/// writes into out_dir (default: the current directory); several configs get
/// one subdirectory per config file stem. Returns the worst exit code.
int cmd_run(const std::vector<std::filesystem::path>& configs, const std::optional<std::filesystem::path>& out_dir,
            unsigned jobs, std::ostream& out, std::ostream& err);

/// Samples the claimed conditions of a registry instance with its declared
/// constants multiplied by scale.
int cmd_verify(const std::string& instance, std::uint64_t seed, std::size_t samples, double scale,
               std::ostream& out, std::ostream& err);

struct RateFit {
  double slope = 0.0;
  std::size_t rows_used = 0;
};

/// Least-squares slope of log(value) against log(k) over the last tail
/// fraction of the points; non-positive values are skipped.
/// Throws ConfigError with fewer than 10 usable points.
RateFit fit_rate(const std::vector<double>& k, const std::vector<double>& value, double tail);

/// Fits the rate of a trace; suboptimality comes from the optimum recorded in
/// summary.json beside the trace, otherwise from the gap column.
int cmd_rates(const std::filesystem::path& trace, double tail, std::ostream& out, std::ostream& err);

}  // namespace fom::cli
