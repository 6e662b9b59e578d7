#pragma once

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "fom/methods.hpp"

namespace fom::cli {

inline constexpr std::string_view kTraceHeader =
    "k,t,theta,primal,dual_surrogate,gap,delta,thm1_residual,thm2_residual,bound,cggap";

/// Shortest decimal string that reads back to the same double.
std::string format_double(double v);

/// Header plus one row per iteration; absent optional values are empty fields.
void write_trace_csv(std::ostream& os, const Trace& trace);

/// Reads a trace written by write_trace_csv. Throws ConfigError on malformed input.
std::vector<TraceRow> read_trace_csv(std::istream& is);

struct Summary {
  double final_gap = 0.0;
  double final_primal = 0.0;
  std::size_t iterations = 0;
  double wall_time_ms = 0.0;
  std::vector<std::string> violations;
  std::size_t violation_count = 0;
  std::string method;
  std::string instance;
  std::optional<double> optimum;
  std::optional<double> theory_exponent;
};

Summary make_summary(const Trace& trace, double wall_time_ms);
std::string summary_to_json(const Summary& summary);
Summary summary_from_json(std::string_view text);

}  // namespace fom::cli
