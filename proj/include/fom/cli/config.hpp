#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "fom/methods.hpp"
#include "fom/problems.hpp"

namespace fom::cli {

/// One experiment: an instance, a method, and where its outputs go.
struct RunConfig {
  InstanceSpec instance;
  MethodConfig method;
  std::optional<double> tolerance;  ///< overrides FOM_TOL and the default
  /// Fixed step given as a multiple of 1/L; resolve_step_rule fills in t.
  std::optional<double> fixed_step_times_L;
  std::string trace_file = "trace.csv";
  std::string summary_file = "summary.json";
};

/// Parses a JSON run configuration. Unknown keys are rejected.
/// Throws ConfigError with a message naming the offending field.
RunConfig parse_run_config(std::string_view json_text);

/// Turns a fixed step given relative to 1/L into an absolute step.
void resolve_step_rule(RunConfig& config, const ProblemInstance& instance);

RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace fom::cli
