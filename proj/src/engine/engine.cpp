#include "fom/engine.hpp"

#include <algorithm>
#include <cmath>

#include "fom/errors.hpp"

namespace fom {
namespace {

Vector scaled_sum(const CompensatedVectorSum& acc, double inv) {
  Vector out(acc.size());
  for (std::size_t i = 0; i < acc.size(); ++i) out[i] = acc.value(i) * inv;
  return out;
}

}  // namespace

EngineState init(const ProblemInstance& instance) {
  instance.validate();
  EngineState st;
  const Vector& s0 = instance.feasible_start;
  st.s_prev = s0;
  st.s_anchor = s0;
  st.x = s0;
  st.z = s0;
  st.x_objective = instance.objective(s0);
  const std::size_t n = instance.dimension();
  const std::size_t m = instance.A.output_dim();
  st.U = CompensatedVectorSum(m);
  st.W = CompensatedVectorSum(n);
  st.Wpsi = CompensatedVectorSum(n);
  return st;
}

StepEvaluation evaluate_step(const EngineState& state, const ProblemInstance& instance, YSelector ysel,
                             double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("evaluate_step: t must be positive and finite");
  const double T_prev = state.total_step();
  StepEvaluation ev;
  ev.t = t;
  ev.theta = t / (T_prev + t);

  switch (ysel) {
    case YSelector::ProxPoint: ev.y = state.s_prev; break;
    case YSelector::CurrentAverage: ev.y = state.x; break;
    case YSelector::FastCombo: ev.y = segment_point(state.x, state.s_prev, ev.theta); break;
  }

  ev.Ay = instance.A.apply(ev.y);
  ev.f_y = instance.f.value(ev.Ay);
  ev.psi_y = instance.psi.value(ev.y);
  ev.g = instance.f.subgradient(ev.Ay);
  ev.c = instance.A.adjoint_apply(ev.g);
  require_finite(ev.c, "A* g");

  ev.prox = prox_step(instance, ev.c, t, state.s_prev);
  const Vector& s = ev.prox.s;
  ev.As = instance.A.apply(s);
  ev.f_s = instance.f.value(ev.As);
  ev.psi_s = instance.psi.value(s);
  if (!std::isfinite(ev.psi_s)) throw DomainError("evaluate_step: s_k left dom Psi");

  ev.x_next = segment_point(state.x, s, ev.theta);
  ev.objective_next = instance.objective(ev.x_next);
  if (!std::isfinite(ev.objective_next)) throw DomainError("evaluate_step: objective at x_{k+1} is not finite (outside dom Psi or overflow)");

  ev.bregman_step = bregman(instance.h, s, state.s_prev);
  const double lin = dot(ev.c, s - ev.y);
  const double bregman_fA = ev.f_s - ev.f_y - lin;
  const double obj_s = ev.f_s + ev.psi_s;
  ev.script_D = ev.objective_next - (1.0 - ev.theta) * state.x_objective - ev.theta * obj_s +
                ev.theta * bregman_fA;
  ev.script_D_scale = std::abs(ev.objective_next) + (1.0 - ev.theta) * std::abs(state.x_objective) +
                      ev.theta * (std::abs(obj_s) + std::abs(ev.f_s) + std::abs(ev.f_y) + std::abs(lin));
  ev.sub_term = t * (ev.psi_y - ev.psi_s - lin) - ev.bregman_step;
  ev.grad_term = t * ev.script_D / ev.theta - ev.bregman_step;
  return ev;
}

void commit_step(EngineState& st, const ProblemInstance& instance, const StepEvaluation& ev) {
  const double t = ev.t;
  if (instance.h.is_zero()) {
    // With theta_0 = 1 the first update gives CGgap_1 = D(x_0, s_0, 1).
    st.cggap = cggap_update(st.cggap.value_or(0.0), ev.script_D, ev.theta);
  }
  st.T.add(t);
  st.T_sq.add(t * t);
  st.U.add_scaled(t, ev.g.data());
  const Vector w_term = ev.c + ev.prox.g_psi;
  st.W.add_scaled(t, w_term.data());
  st.Wpsi.add_scaled(t, ev.prox.g_psi.data());
  st.Cf.add(t * fenchel_conjugate_at_subgradient(ev.f_y, ev.Ay, ev.g));
  st.Cpsi.add(t * fenchel_conjugate_at_subgradient(ev.psi_s, ev.prox.s, ev.prox.g_psi));
  st.Sfy.add(t * ev.f_y);
  st.Spsiy.add(t * ev.psi_y);
  st.Sprimal_s.add(t * (ev.f_s + ev.psi_s));
  st.Ssub.add(ev.sub_term);
  st.Sgrad.add(ev.grad_term);

  st.x = ev.x_next;
  st.x_objective = ev.objective_next;
  st.z = segment_point(st.z, ev.y, ev.theta);
  st.s_prev = ev.prox.s;
  st.last_t = t;
  st.last_theta = ev.theta;
  ++st.k;
}

void iterate(EngineState& state, const ProblemInstance& instance, YSelector ysel, double t) {
  commit_step(state, instance, evaluate_step(state, instance, ysel, t));
}

double d_conjugate(const EngineState& st, const ProblemInstance& instance) {
  if (st.k == 0) throw DomainError("d_conjugate: undefined before the first iteration");
  if (instance.h.is_zero()) return 0.0;
  const Vector diff = instance.h.gradient(st.s_prev) - instance.h.gradient(st.s_anchor);
  return (dot(diff, st.s_prev) - bregman(instance.h, st.s_prev, st.s_anchor)) / st.total_step();
}

double relative_residual(double lhs, double rhs) {
  return std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs));
}

Certificate certificate(const EngineState& st, const ProblemInstance& instance, CertificateMode mode) {
  if (st.k == 0) throw DomainError("certificate: requires k >= 1");
  const double T = st.total_step();
  const double inv = 1.0 / T;
  const Vector u = scaled_sum(st.U, inv);
  const Vector w_minus_Au = scaled_sum(st.Wpsi, inv);
  const double dconj = d_conjugate(st, instance);

  Certificate cert;
  cert.primal = mode == CertificateMode::AverageX ? st.x_objective : instance.objective(st.z);
  const double fstar = instance.f.conjugate(u);
  const double psistar = instance.psi.conjugate(w_minus_Au);
  cert.dual_surrogate = -fstar - (psistar + dconj);
  cert.gap = cert.primal + fstar + psistar + dconj;
  cert.fenchel_gap = cert.primal + fstar + instance.psi.conjugate(-1.0 * instance.A.adjoint_apply(u));

  const double conj_avg = (st.Cf.value() + st.Cpsi.value()) * inv;
  cert.thm1_lhs = (st.Sfy.value() + st.Spsiy.value() + st.Cf.value() + st.Cpsi.value()) * inv + dconj;
  cert.thm1_rhs = st.Ssub.value() * inv;
  cert.thm2_lhs = st.x_objective + conj_avg + dconj;
  cert.thm2_rhs = st.Sgrad.value() * inv;
  cert.thm1_residual = relative_residual(cert.thm1_lhs, cert.thm1_rhs);
  cert.thm2_residual = relative_residual(cert.thm2_lhs, cert.thm2_rhs);
  cert.delta = mode == CertificateMode::AverageX ? cert.thm2_rhs : cert.thm1_rhs;
  return cert;
}

double script_D(const ProblemInstance& instance, const Vector& x, const Vector& y, const Vector& g,
                const Vector& s, double theta) {
  if (!(theta >= 0.0 && theta <= 1.0)) throw DomainError("script_D: theta outside [0, 1]");
  const Vector p = segment_point(x, s, theta);
  const double obj_p = instance.objective(p);
  const double obj_x = instance.objective(x);
  const double obj_s = instance.objective(s);
  if (!std::isfinite(obj_p) || !std::isfinite(obj_x) || !std::isfinite(obj_s))
    throw DomainError("script_D: point outside dom Psi");
  const Vector As = instance.A.apply(s);
  const Vector Ay = instance.A.apply(y);
  const double bregman_fA = instance.f.value(As) - instance.f.value(Ay) - dot(g, As - Ay);
  return obj_p - (1.0 - theta) * obj_x - theta * obj_s + theta * bregman_fA;
}

double simple_D(const ProblemInstance& instance, const Vector& x, const Vector& g, const Vector& s,
                double theta) {
  if (!(theta >= 0.0 && theta <= 1.0)) throw DomainError("simple_D: theta outside [0, 1]");
  const Vector p = segment_point(x, s, theta);
  const double psi_p = instance.psi.value(p);
  const double psi_x = instance.psi.value(x);
  const double psi_s = instance.psi.value(s);
  if (!std::isfinite(psi_p) || !std::isfinite(psi_x) || !std::isfinite(psi_s))
    throw DomainError("simple_D: point outside dom Psi");
  const Vector Ap = instance.A.apply(p);
  const Vector Ax = instance.A.apply(x);
  const double bregman_fA = instance.f.value(Ap) - instance.f.value(Ax) - dot(g, Ap - Ax);
  return bregman_fA + psi_p - (1.0 - theta) * psi_x - theta * psi_s;
}

double cggap_update(double cggap, double d_value, double theta) {
  return (1.0 - theta) * cggap + d_value;
}

}  // namespace fom
