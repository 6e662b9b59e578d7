#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fom/engine.hpp"
#include "fom/steprules.hpp"

namespace fom {

enum class CGSchedule { Theta, LineSearch };

/// Generalized conditional subgradient: h == 0, y_k = x_k.
struct ConditionalSubgradient {
  double nu = 1.0;
  CGSchedule schedule = CGSchedule::Theta;
  LineSearchCG line_search{};
};

/// Bregman proximal gradient: y_k = s_{k-1}. The rule is a BacktrackSmooth,
/// FixedT or FixedScheduleT.
struct ProxGradient {
  StepRule rule = BacktrackSmooth{};
};

/// Bregman proximal subgradient with t_i = C / sqrt(K) over the horizon K.
struct ProxSubgradient {
  double C = 1.0;
};

/// y_k = (1 - theta_k) x_k + theta_k s_{k-1} with backtracked steps.
struct FastGradient {
  double gamma = 2.0;
  StepRule rule = BacktrackSmooth{};
};

/// Fast method with the inexact descent condition; eps is the target accuracy.
struct UniversalGradient {
  double eps = 1e-3;
  BacktrackSmooth rule{};
};

using Method = std::variant<ConditionalSubgradient, ProxGradient, ProxSubgradient, FastGradient, UniversalGradient>;

struct MethodConfig {
  Method method;
  std::size_t iterations = 1000;
};

std::string method_name(const Method& method);
YSelector y_selector(const Method& method);
CertificateMode certificate_mode(const Method& method);

/// Throws UnsupportedPair or ConfigError when the method cannot run on the instance.
void check_compatible(const ProblemInstance& instance, const MethodConfig& config);

/// Exponent of k in the method's rate, or nullopt when the instance does not
/// claim the condition the rate needs.
std::optional<double> theory_exponent(const MethodConfig& config, const ProblemInstance& instance);

struct BoundAux {
  double bregman_to_optimum = 0.0;  ///< D_h(x*, x_0)
  double T = 0.0;                   ///< sum t_i
  double T_sq = 0.0;                ///< sum t_i^2
};

/// The convergence bound of the method at iteration k (k >= 1), or nullopt
/// when the instance does not claim the required condition.
/// Throws ConfigError when a claimed condition lacks its constants.
std::optional<double> rate_bound(const MethodConfig& config, const ProblemInstance& instance,
                                        std::size_t k, const BoundAux& aux);

/// M (sum t_i^2 / 2) / T for the proximal subgradient method.
double subgradient_rhs_check(const EngineState& state, const ProblemInstance& instance);

struct TraceRow {
  std::size_t k = 0;
  double t = 0.0;
  double theta = 0.0;
  double primal = 0.0;
  double dual_surrogate = 0.0;
  double gap = 0.0;
  double delta = 0.0;
  double thm1_residual = 0.0;
  double thm2_residual = 0.0;
  std::optional<double> bound;
  std::optional<double> cggap;
  std::optional<double> suboptimality;
  double fenchel_gap = 0.0;
  double eps_sum = 0.0;  ///< sum of t D / theta - D_h(s, s_prev) so far
  double total_step = 0.0;
};

struct RunOptions {
  double tolerance = 1e-8;
  /// Optimum used for suboptimality and bounds; defaults to the instance's known optimum.
  std::optional<KnownOptimum> reference;
  std::size_t max_reported_violations = 50;
};

struct Trace {
  std::string method;
  std::string instance;
  std::vector<TraceRow> rows;
  std::vector<std::string> violations;
  std::size_t violation_count = 0;
  std::optional<double> optimum;
  std::optional<double> theory_exponent;
  Vector final_point;
  std::size_t step_evaluations = 0;
};

/// Runs the method for config.iterations steps, recording a certificate per
/// step and collecting violated runtime assertions in Trace::violations.
/// Throws BacktrackFailed, NotAdmissible and compatibility errors.
Trace run(const ProblemInstance& instance, const MethodConfig& config, const RunOptions& options = {});

/// Default residual tolerance, overridden by the FOM_TOL environment variable.
double default_tolerance();

}  // namespace fom
