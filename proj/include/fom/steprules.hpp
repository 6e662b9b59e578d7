#pragma once

#include <cstddef>
#include <functional>
#include <variant>
#include <vector>

#include "fom/engine.hpp"

namespace fom {

struct FixedT {
  double t = 1.0;
};

/// t_k = t[k]; the last entry repeats past the end.
struct FixedScheduleT {
  std::vector<double> t;
};

/// theta_k = (1 + nu) / (k + 1 + nu), so theta_0 = 1.
struct ThetaScheduleCG {
  double nu = 1.0;
};

struct BacktrackSmooth {
  double r = 2.0;
  double t_init = 1.0;
  int max_halvings = 60;
  int max_growth = 60;
};

struct BacktrackUniversal {
  double r = 2.0;
  double eps = 1e-3;
  double t_init = 1.0;
  int max_halvings = 60;
  int max_growth = 60;
};

struct LineSearchCG {
  int max_iters = 64;
  double interval_tol = 1e-10;
};

using StepRule =
    std::variant<FixedT, FixedScheduleT, ThetaScheduleCG, BacktrackSmooth, BacktrackUniversal, LineSearchCG>;

/// Validates r > 1, eps > 0, positive steps and budgets. Throws ConfigError.
void validate_rule(const StepRule& rule);

double theta_from_history(double t_k, double T_prev);

/// t_k = theta T_prev / (1 - theta). With T_prev == 0 only theta == 1 is
/// allowed and t0 is returned. Throws DomainError for theta == 1, T_prev > 0.
double t_from_theta(double theta, double T_prev, double t0 = 1.0);

double cg_theta(std::size_t k, double nu);

/// The descent condition t D / theta <= D_h(s, s_prev) + t eps, with a
/// rounding allowance proportional to the magnitudes involved.
bool descent_condition_holds(const StepEvaluation& step, double eps);

struct BacktrackResult {
  StepEvaluation step;  ///< accepted candidate, ready to commit
  int evaluations = 0;
  int halvings = 0;
  int growths = 0;
  /// True when t * r was evaluated and failed the condition.
  bool r_large_verified = false;
};

/// Starts from t_init at k = 0 and from r times the last accepted step
/// afterwards. Grows by r while the condition keeps holding (at most
/// max_growth times), otherwise shrinks by r until it holds.
/// Throws BacktrackFailed after max_halvings failed shrinks.
BacktrackResult backtrack(const EngineState& state, const ProblemInstance& instance, YSelector ysel,
                          const BacktrackSmooth& rule);
BacktrackResult backtrack(const EngineState& state, const ProblemInstance& instance, YSelector ysel,
                          const BacktrackUniversal& rule);

/// Golden-section minimizer of a function on [0, 1]; returns the midpoint of
/// the final bracket.
double golden_section(const std::function<double(double)>& phi, int max_iters, double interval_tol);

/// argmin over theta in [0, 1] of (1 - theta) CGgap_k + D(x, s, theta).
double linesearch_cg(const EngineState& state, const ProblemInstance& instance, const Vector& x,
                     const Vector& g, const Vector& s, const LineSearchCG& rule = {});

/// L (gamma / (k + gamma))^gamma.
double fast_step_ratio_bound(std::size_t k, double gamma, double L);

/// Steps satisfying 1 / (theta_i^(gamma-1) t_i) <= L with equality, the
/// extremal sequence for which the bound on theta_k / t_k is tightest.
std::vector<double> extremal_fast_steps(std::size_t count, double gamma, double L);

/// Weighted AM-GM: a^alpha b^beta <= ((alpha a + beta b) / (alpha + beta))^(alpha + beta).
bool amgm_check(double a, double b, double alpha, double beta);

}  // namespace fom
