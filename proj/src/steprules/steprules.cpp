#include "fom/steprules.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "fom/detail/overloaded.hpp"
#include "fom/errors.hpp"

namespace fom {
namespace {

constexpr double kRoundingFactor = 64.0 * std::numeric_limits<double>::epsilon();
constexpr double kMaxStep = 1e150;

struct BacktrackParams {
  double r;
  double eps;
  double t_init;
  int max_halvings;
  int max_growth;
};

void check_backtrack(double r, double t_init, int max_halvings, int max_growth) {
  if (!(r > 1.0) || !std::isfinite(r)) throw ConfigError("backtracking: r must exceed 1");
  if (!(t_init > 0.0) || !std::isfinite(t_init)) throw ConfigError("backtracking: t_init must be positive");
  if (max_halvings < 1) throw ConfigError("backtracking: max_halvings must be at least 1");
  if (max_growth < 0) throw ConfigError("backtracking: max_growth must be non-negative");
}

BacktrackResult backtrack_impl(const EngineState& state, const ProblemInstance& instance, YSelector ysel,
                               const BacktrackParams& p) {
  BacktrackResult res;
  double t = state.k == 0 ? p.t_init : std::min(state.last_t * p.r, std::max(state.last_t, kMaxStep));
  StepEvaluation cur = evaluate_step(state, instance, ysel, t);
  res.evaluations = 1;

  if (descent_condition_holds(cur, p.eps)) {
    while (res.growths < p.max_growth) {
      // A step that does not move leaves the condition trivially true for every t.
      if (cur.bregman_step == 0.0 && cur.script_D == 0.0) break;
      const double next_t = t * p.r;
      if (next_t > kMaxStep) break;
      StepEvaluation next = evaluate_step(state, instance, ysel, next_t);
      ++res.evaluations;
      if (!descent_condition_holds(next, p.eps)) {
        res.r_large_verified = true;
        break;
      }
      cur = std::move(next);
      t = next_t;
      ++res.growths;
    }
    res.step = std::move(cur);
    return res;
  }

  while (res.halvings < p.max_halvings) {
    t /= p.r;
    ++res.halvings;
    StepEvaluation next = evaluate_step(state, instance, ysel, t);
    ++res.evaluations;
    if (descent_condition_holds(next, p.eps)) {
      res.r_large_verified = true;
      res.step = std::move(next);
      return res;
    }
  }
  char msg[128];
  std::snprintf(msg, sizeof msg, "descent condition fails down to t = %.6g at iteration %zu", t, state.k);
  throw BacktrackFailed(msg);
}

}  // namespace

void validate_rule(const StepRule& rule) {
  std::visit(detail::overloaded{
                 [](const FixedT& r) {
                   if (!(r.t > 0.0) || !std::isfinite(r.t)) throw ConfigError("FixedT: t must be positive");
                 },
                 [](const FixedScheduleT& r) {
                   if (r.t.empty()) throw ConfigError("FixedScheduleT: empty schedule");
                   for (double t : r.t)
                     if (!(t > 0.0) || !std::isfinite(t)) throw ConfigError("FixedScheduleT: steps must be positive");
                 },
                 [](const ThetaScheduleCG& r) {
                   if (!(r.nu > 0.0 && r.nu <= 1.0)) throw ConfigError("ThetaScheduleCG: nu must lie in (0, 1]");
                 },
                 [](const BacktrackSmooth& r) { check_backtrack(r.r, r.t_init, r.max_halvings, r.max_growth); },
                 [](const BacktrackUniversal& r) {
                   check_backtrack(r.r, r.t_init, r.max_halvings, r.max_growth);
                   if (!(r.eps > 0.0)) throw ConfigError("BacktrackUniversal: eps must be positive");
                 },
                 [](const LineSearchCG& r) {
                   if (r.max_iters < 1) throw ConfigError("LineSearchCG: max_iters must be positive");
                   if (!(r.interval_tol > 0.0)) throw ConfigError("LineSearchCG: interval_tol must be positive");
                 },
             },
             rule);
}

double theta_from_history(double t_k, double T_prev) {
  if (!(t_k > 0.0) || !(T_prev >= 0.0)) throw DomainError("theta_from_history: need t_k > 0, T_prev >= 0");
  return t_k / (T_prev + t_k);
}

double t_from_theta(double theta, double T_prev, double t0) {
  if (!(theta > 0.0 && theta <= 1.0)) throw DomainError("t_from_theta: theta must lie in (0, 1]");
  if (T_prev == 0.0) {
    if (theta != 1.0) throw DomainError("t_from_theta: first step requires theta = 1");
    return t0;
  }
  if (theta == 1.0) throw DomainError("t_from_theta: theta = 1 after the first step gives unbounded t");
  return theta * T_prev / (1.0 - theta);
}

double cg_theta(std::size_t k, double nu) {
  return (1.0 + nu) / (static_cast<double>(k) + 1.0 + nu);
}

bool descent_condition_holds(const StepEvaluation& ev, double eps) {
  const double ratio = ev.t / ev.theta;
  const double lhs = ratio * ev.script_D;
  const double rhs = ev.bregman_step + ev.t * eps;
  const double slack = kRoundingFactor * (ratio * ev.script_D_scale + std::abs(ev.bregman_step));
  return lhs <= rhs + slack;
}

BacktrackResult backtrack(const EngineState& state, const ProblemInstance& instance, YSelector ysel,
                          const BacktrackSmooth& rule) {
  check_backtrack(rule.r, rule.t_init, rule.max_halvings, rule.max_growth);
  return backtrack_impl(state, instance, ysel,
                        {rule.r, 0.0, rule.t_init, rule.max_halvings, rule.max_growth});
}

BacktrackResult backtrack(const EngineState& state, const ProblemInstance& instance, YSelector ysel,
                          const BacktrackUniversal& rule) {
  check_backtrack(rule.r, rule.t_init, rule.max_halvings, rule.max_growth);
  if (!(rule.eps > 0.0)) throw ConfigError("BacktrackUniversal: eps must be positive");
  return backtrack_impl(state, instance, ysel,
                        {rule.r, rule.eps, rule.t_init, rule.max_halvings, rule.max_growth});
}

double golden_section(const std::function<double(double)>& phi, int max_iters, double interval_tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = 0.0, b = 1.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = phi(c), fd = phi(d);
  for (int it = 0; it < max_iters && (b - a) >= interval_tol; ++it) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = phi(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = phi(d);
    }
  }
  return 0.5 * (a + b);
}

double linesearch_cg(const EngineState& state, const ProblemInstance& instance, const Vector& x,
                     const Vector& g, const Vector& s, const LineSearchCG& rule) {
  const double gap = state.cggap.value_or(0.0);
  auto phi = [&](double theta) { return (1.0 - theta) * gap + simple_D(instance, x, g, s, theta); };
  return golden_section(phi, rule.max_iters, rule.interval_tol);
}

double fast_step_ratio_bound(std::size_t k, double gamma, double L) {
  return L * std::pow(gamma / (static_cast<double>(k) + gamma), gamma);
}

std::vector<double> extremal_fast_steps(std::size_t count, double gamma, double L) {
  std::vector<double> steps;
  steps.reserve(count);
  double T = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    double t;
    if (i == 0) {
      t = 1.0 / L;
    } else {
      // t^gamma / (T + t)^(gamma - 1) = 1 / L; the left side increases in t.
      auto excess = [&](double x) { return gamma * std::log(x) - (gamma - 1.0) * std::log(T + x) + std::log(L); };
      double lo = 1e-300, hi = 1.0;
      while (excess(hi) < 0.0) hi *= 2.0;
      lo = hi / 2.0;
      while (excess(lo) > 0.0) lo /= 2.0;
      for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (excess(mid) < 0.0 ? lo : hi) = mid;
      }
      // The upper end satisfies the constraint 1 / (theta^(gamma-1) t) <= L.
      t = hi;
    }
    steps.push_back(t);
    T += t;
  }
  return steps;
}

bool amgm_check(double a, double b, double alpha, double beta) {
  const double lhs = std::pow(a, alpha) * std::pow(b, beta);
  const double rhs = std::pow((alpha * a + beta * b) / (alpha + beta), alpha + beta);
  return lhs <= rhs * (1.0 + 1e-12);
}

}  // namespace fom
