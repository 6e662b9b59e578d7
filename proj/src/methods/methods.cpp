#include "fom/methods.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "fom/detail/overloaded.hpp"
#include "fom/errors.hpp"

namespace fom {
namespace {

constexpr double kWeakDualityTol = 1e-9;
constexpr double kThetaFloor = 1e-12;
constexpr double kThetaCeil = 1.0 - 1e-6;

double scaled_tol(double tol, double ref) { return tol * std::max(1.0, std::abs(ref)); }

std::optional<double> backtrack_ratio(const StepRule& rule) {
  if (const auto* b = std::get_if<BacktrackSmooth>(&rule)) return b->r;
  return std::nullopt;
}

bool rule_is_primal_step(const StepRule& rule) {
  return std::holds_alternative<FixedT>(rule) || std::holds_alternative<FixedScheduleT>(rule) ||
         std::holds_alternative<BacktrackSmooth>(rule);
}

double fixed_step(const StepRule& rule, std::size_t k) {
  return std::visit(detail::overloaded{
                        [](const FixedT& r) { return r.t; },
                        [k](const FixedScheduleT& r) { return r.t[std::min(k, r.t.size() - 1)]; },
                        [](const auto&) -> double { throw ConfigError("rule has no fixed step"); },
                    },
                    rule);
}

double max_fixed_step(const StepRule& rule) {
  if (const auto* f = std::get_if<FixedT>(&rule)) return f->t;
  if (const auto* s = std::get_if<FixedScheduleT>(&rule)) return *std::max_element(s->t.begin(), s->t.end());
  return 0.0;
}

double require_constant(const std::optional<double>& c, const char* what, const ProblemInstance& inst) {
  if (!c) throw ConfigError("instance " + inst.name + " claims a condition but declares no " + what);
  return *c;
}

class ViolationLog {
 public:
  ViolationLog(Trace& trace, std::size_t cap) : trace_(trace), cap_(cap) {}

  void check(bool ok, std::size_t k, const std::string& what, double value, double limit) {
    if (ok) return;
    ++trace_.violation_count;
    if (trace_.violations.size() >= cap_) return;
    std::ostringstream os;
    os.precision(6);
    os << "k=" << k << ": " << what << " " << value << " exceeds " << limit;
    trace_.violations.push_back(os.str());
  }

 private:
  Trace& trace_;
  std::size_t cap_;
};

}  // namespace

std::string method_name(const Method& method) {
  return std::visit(detail::overloaded{
                        [](const ConditionalSubgradient&) { return std::string("conditional-subgradient"); },
                        [](const ProxGradient&) { return std::string("prox-gradient"); },
                        [](const ProxSubgradient&) { return std::string("prox-subgradient"); },
                        [](const FastGradient&) { return std::string("fast-gradient"); },
                        [](const UniversalGradient&) { return std::string("universal-gradient"); },
                    },
                    method);
}

YSelector y_selector(const Method& method) {
  return std::visit(detail::overloaded{
                        [](const ConditionalSubgradient&) { return YSelector::CurrentAverage; },
                        [](const ProxGradient&) { return YSelector::ProxPoint; },
                        [](const ProxSubgradient&) { return YSelector::ProxPoint; },
                        [](const FastGradient&) { return YSelector::FastCombo; },
                        [](const UniversalGradient&) { return YSelector::FastCombo; },
                    },
                    method);
}

CertificateMode certificate_mode(const Method& method) {
  return std::holds_alternative<ProxSubgradient>(method) ? CertificateMode::AverageZ : CertificateMode::AverageX;
}

void check_compatible(const ProblemInstance& instance, const MethodConfig& config) {
  instance.validate();
  if (config.iterations < 1) throw ConfigError("iterations must be at least 1");
  const bool cg = std::holds_alternative<ConditionalSubgradient>(config.method);
  if (cg && !instance.h.is_zero())
    throw UnsupportedPair("conditional-subgradient requires the zero reference function");
  if (!cg && instance.h.is_zero())
    throw UnsupportedPair(method_name(config.method) + " requires a nonzero reference function");
  if (!has_prox_solver(instance.h, instance.psi))
    throw UnsupportedPair("no proximal solver for h = " + instance.h.name() + ", Psi = " + instance.psi.name());

  std::visit(detail::overloaded{
                 [](const ConditionalSubgradient& m) {
                   if (!(m.nu > 0.0 && m.nu <= 1.0)) throw ConfigError("nu must lie in (0, 1]");
                   validate_rule(m.line_search);
                 },
                 [](const ProxGradient& m) {
                   if (!rule_is_primal_step(m.rule))
                     throw ConfigError("prox-gradient takes a fixed step or smooth backtracking");
                   validate_rule(m.rule);
                 },
                 [](const ProxSubgradient& m) {
                   if (!(m.C > 0.0) || !std::isfinite(m.C)) throw ConfigError("C must be positive");
                 },
                 [](const FastGradient& m) {
                   if (!(m.gamma >= 1.0)) throw ConfigError("gamma must be at least 1");
                   if (!rule_is_primal_step(m.rule))
                     throw ConfigError("fast-gradient takes a fixed step or smooth backtracking");
                   validate_rule(m.rule);
                 },
                 [](const UniversalGradient& m) {
                   if (!(m.eps > 0.0)) throw ConfigError("eps must be positive");
                   validate_rule(m.rule);
                 },
             },
             config.method);
}

std::optional<double> theory_exponent(const MethodConfig& config, const ProblemInstance& instance) {
  const auto& c = instance.constants;
  const auto when = [&instance](Condition needed, double exponent) -> std::optional<double> {
    if (!instance.claims_condition(needed)) return std::nullopt;
    return exponent;
  };
  return std::visit(detail::overloaded{
                        [&](const ConditionalSubgradient& m) { return when(Condition::Curvature, -m.nu); },
                        [&](const ProxGradient&) { return when(Condition::RelativeSmooth, -1.0); },
                        [&](const ProxSubgradient&) { return when(Condition::RelativeContinuity, -0.5); },
                        [&](const FastGradient& m) { return when(Condition::TriangleSmooth, -m.gamma); },
                        [&](const UniversalGradient&) -> std::optional<double> {
                          if (!c.nu) return std::nullopt;
                          return when(Condition::HolderSmooth, -(1.0 + 3.0 * *c.nu) / (1.0 + *c.nu));
                        },
                    },
                    config.method);
}

std::optional<double> rate_bound(const MethodConfig& config, const ProblemInstance& instance,
                                        std::size_t k, const BoundAux& aux) {
  if (k < 1) throw DomainError("rate_bound: k must be at least 1");
  const auto& c = instance.constants;
  const double kd = static_cast<double>(k);
  const double D = aux.bregman_to_optimum;
  return std::visit(
      detail::overloaded{
          [&](const ConditionalSubgradient& m) -> std::optional<double> {
            if (!instance.claims_condition(Condition::Curvature)) return std::nullopt;
            const double M = require_constant(c.M, "M", instance);
            const double nu_declared = require_constant(c.nu, "nu", instance);
            if (m.nu > nu_declared) return std::nullopt;
            return M * std::pow((1.0 + m.nu) / (kd + 1.0 + m.nu), m.nu);
          },
          [&](const ProxGradient& m) -> std::optional<double> {
            if (!instance.claims_condition(Condition::RelativeSmooth)) return std::nullopt;
            const double L = require_constant(c.L, "L", instance);
            if (auto r = backtrack_ratio(m.rule)) return *r * L * D / kd;
            if (max_fixed_step(m.rule) * L > 1.0) return std::nullopt;
            return D / aux.T;
          },
          [&](const ProxSubgradient&) -> std::optional<double> {
            if (!instance.claims_condition(Condition::RelativeContinuity)) return std::nullopt;
            const double M = require_constant(c.M, "M", instance);
            return (D + M * aux.T_sq / 2.0) / aux.T;
          },
          [&](const FastGradient& m) -> std::optional<double> {
            if (!instance.claims_condition(Condition::TriangleSmooth)) return std::nullopt;
            const double L = require_constant(c.L, "L", instance);
            const double gamma_declared = require_constant(c.gamma, "gamma", instance);
            if (m.gamma > gamma_declared) return std::nullopt;
            const auto r = backtrack_ratio(m.rule);
            if (!r) return std::nullopt;
            const double g = m.gamma;
            return std::pow(g, g) * std::pow(*r, g) * L * D / std::pow(kd + g - 1.0, g);
          },
          [&](const UniversalGradient& m) -> std::optional<double> {
            if (!instance.claims_condition(Condition::HolderSmooth)) return std::nullopt;
            const double M = require_constant(c.M, "M", instance);
            const double nu = require_constant(c.nu, "nu", instance);
            const double r = m.rule.r;
            const double rate = (1.0 + 3.0 * nu) / (1.0 + nu);
            return 2.0 * std::pow(r, rate) * std::pow(M, 2.0 / (1.0 + nu)) * D /
                       (std::pow(m.eps, (1.0 - nu) / (1.0 + nu)) * std::pow(kd, rate)) +
                   m.eps;
          },
      },
      config.method);
}

double subgradient_rhs_check(const EngineState& state, const ProblemInstance& instance) {
  const double M = require_constant(instance.constants.M, "M", instance);
  return M * (state.T_sq.value() / 2.0) / state.total_step();
}

double default_tolerance() {
  if (const char* env = std::getenv("FOM_TOL")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end != env && v > 0.0 && std::isfinite(v)) return v;
  }
  return 1e-8;
}

Trace run(const ProblemInstance& instance, const MethodConfig& config, const RunOptions& options) {
  check_compatible(instance, config);
  const Method& method = config.method;
  const YSelector ysel = y_selector(method);
  const CertificateMode mode = certificate_mode(method);
  const double tol = options.tolerance;
  const std::size_t K = config.iterations;

  Trace trace;
  trace.method = method_name(method);
  trace.instance = instance.name;
  trace.theory_exponent = theory_exponent(config, instance);
  trace.rows.reserve(K);
  ViolationLog log(trace, options.max_reported_violations);

  const std::optional<KnownOptimum> reference = options.reference ? options.reference : instance.known_optimum;
  std::optional<double> bregman_to_optimum;
  if (reference) {
    trace.optimum = reference->value;
    if (reference->point)
      bregman_to_optimum = instance.h.is_zero() ? 0.0 : bregman(instance.h, *reference->point, instance.feasible_start);
  }

  EngineState state = init(instance);
  const double start_objective = state.x_objective;
  const bool cg = std::holds_alternative<ConditionalSubgradient>(method);
  const bool subgradient = std::holds_alternative<ProxSubgradient>(method);

  for (std::size_t k = 0; k < K; ++k) {
    const double T_prev = state.total_step();
    StepEvaluation step = std::visit(
        detail::overloaded{
            [&](const ConditionalSubgradient& m) {
              double theta = 1.0;
              if (k > 0) {
                if (m.schedule == CGSchedule::Theta) {
                  theta = cg_theta(k, m.nu);
                } else {
                  // s_k = linmin(A* g_k) does not depend on t when h == 0.
                  const StepEvaluation probe = evaluate_step(state, instance, ysel, 1.0);
                  ++trace.step_evaluations;
                  theta = linesearch_cg(state, instance, state.x, probe.g, probe.prox.s, m.line_search);
                  theta = std::clamp(theta, kThetaFloor, kThetaCeil);
                }
              }
              ++trace.step_evaluations;
              return evaluate_step(state, instance, ysel, t_from_theta(theta, T_prev));
            },
            [&](const ProxGradient& m) {
              if (const auto* b = std::get_if<BacktrackSmooth>(&m.rule)) {
                BacktrackResult res = backtrack(state, instance, ysel, *b);
                trace.step_evaluations += res.evaluations;
                return std::move(res.step);
              }
              ++trace.step_evaluations;
              return evaluate_step(state, instance, ysel, fixed_step(m.rule, k));
            },
            [&](const ProxSubgradient& m) {
              ++trace.step_evaluations;
              return evaluate_step(state, instance, ysel, m.C / std::sqrt(static_cast<double>(K)));
            },
            [&](const FastGradient& m) {
              if (const auto* b = std::get_if<BacktrackSmooth>(&m.rule)) {
                BacktrackResult res = backtrack(state, instance, ysel, *b);
                trace.step_evaluations += res.evaluations;
                return std::move(res.step);
              }
              ++trace.step_evaluations;
              return evaluate_step(state, instance, ysel, fixed_step(m.rule, k));
            },
            [&](const UniversalGradient& m) {
              const BacktrackUniversal rule{m.rule.r, m.eps, m.rule.t_init, m.rule.max_halvings, m.rule.max_growth};
              BacktrackResult res = backtrack(state, instance, ysel, rule);
              trace.step_evaluations += res.evaluations;
              return std::move(res.step);
            },
        },
        method);

    commit_step(state, instance, step);
    const Certificate cert = certificate(state, instance, mode);
    const std::size_t kk = state.k;

    TraceRow row;
    row.k = kk;
    row.t = step.t;
    row.theta = step.theta;
    row.primal = cert.primal;
    row.dual_surrogate = cert.dual_surrogate;
    row.gap = cert.gap;
    row.delta = cert.delta;
    row.thm1_residual = cert.thm1_residual;
    row.thm2_residual = cert.thm2_residual;
    row.cggap = state.cggap;
    row.eps_sum = state.Sgrad.value();
    row.total_step = state.total_step();
    if (reference) row.suboptimality = cert.primal - reference->value;
    if (bregman_to_optimum)
      row.bound = rate_bound(config, instance, kk,
                                    {*bregman_to_optimum, state.total_step(), state.T_sq.value()});

    log.check(row.thm1_residual <= tol, kk, "thm1 residual", row.thm1_residual, tol);
    log.check(row.thm2_residual <= tol, kk, "thm2 residual", row.thm2_residual, tol);
    row.fenchel_gap = cert.fenchel_gap;
    // Fenchel weak duality for the unperturbed pair. The perturbed gap only obeys
    // gap >= P(x_k) - P(x) - D_h(x, x_0) / T for every x; x = x_0 makes the last term vanish.
    log.check(row.fenchel_gap >= -scaled_tol(kWeakDualityTol, row.primal), kk, "negative Fenchel gap",
              -row.fenchel_gap, kWeakDualityTol);
    const double perturbed_floor = row.primal - start_objective;
    log.check(row.gap >= perturbed_floor - scaled_tol(tol, perturbed_floor), kk, "gap below P(x_k) - P(x_0)",
              perturbed_floor, row.gap);
    log.check(row.gap <= row.delta + scaled_tol(tol, row.delta), kk, "gap over delta", row.gap, row.delta);

    if (row.suboptimality && bregman_to_optimum && mode == CertificateMode::AverageX) {
      const double descent_bound = (*bregman_to_optimum + row.eps_sum) / row.total_step;
      log.check(*row.suboptimality <= descent_bound + tol, kk, "suboptimality over descent bound", *row.suboptimality,
                descent_bound);
    }
    if (row.bound) {
      const double slack = scaled_tol(tol, *row.bound);
      if (cg) {
        log.check(row.gap <= *row.bound + slack, kk, "gap over rate bound", row.gap, *row.bound);
        log.check(*row.cggap <= *row.bound + slack, kk, "CGgap over rate bound", *row.cggap, *row.bound);
      } else if (row.suboptimality) {
        log.check(*row.suboptimality <= *row.bound + slack, kk, "suboptimality over rate bound",
                  *row.suboptimality, *row.bound);
      }
    }
    if (cg) {
      log.check(row.gap <= *row.cggap + scaled_tol(tol, *row.cggap), kk, "gap over CGgap", row.gap, *row.cggap);
    }
    if (subgradient && instance.claims_condition(Condition::RelativeContinuity) && instance.constants.M) {
      const double rhs = subgradient_rhs_check(state, instance);
      log.check(row.delta <= rhs + scaled_tol(tol, rhs), kk, "delta over continuity bound", row.delta, rhs);
    }
    trace.rows.push_back(std::move(row));
  }

  trace.final_point = mode == CertificateMode::AverageX ? state.x : state.z;
  return trace;
}

}  // namespace fom
