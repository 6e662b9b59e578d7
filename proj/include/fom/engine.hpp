#pragma once

#include <cstddef>
#include <optional>

#include "fom/oracles.hpp"
#include "fom/prox.hpp"
#include "fom/summation.hpp"

namespace fom {

/// How the point y_k at which f is linearized is chosen.
enum class YSelector {
  ProxPoint,       ///< y_k = s_{k-1}
  CurrentAverage,  ///< y_k = x_k
  FastCombo,       ///< y_k = (1 - theta_k) x_k + theta_k s_{k-1}
};

/// Which primal average a certificate is reported for.
enum class CertificateMode { AverageX, AverageZ };

/// Iterate data and running sums of the meta-algorithm after k steps. All
/// sums run over i = 0..k-1 and are compensated.
struct EngineState {
  std::size_t k = 0;
  Vector s_prev;    ///< s_{k-1}
  Vector s_anchor;  ///< s_{-1}
  Vector x;         ///< x_k
  Vector z;         ///< z_k
  double x_objective = 0.0;  ///< f(A x_k) + Psi(x_k)

  CompensatedSum T;       ///< sum t_i
  CompensatedSum T_sq;    ///< sum t_i^2
  CompensatedVectorSum U;     ///< sum t_i g_i (in F*)
  CompensatedVectorSum W;     ///< sum t_i (A* g_i + g_i^Psi)
  CompensatedVectorSum Wpsi;  ///< sum t_i g_i^Psi, i.e. T (w_k - A* u_k)
  CompensatedSum Cf;          ///< sum t_i f*(g_i)
  CompensatedSum Cpsi;        ///< sum t_i Psi*(g_i^Psi)
  CompensatedSum Sfy;         ///< sum t_i f(A y_i)
  CompensatedSum Spsiy;       ///< sum t_i Psi(y_i)
  CompensatedSum Sprimal_s;   ///< sum t_i (f(A s_i) + Psi(s_i))
  CompensatedSum Ssub;  ///< sum t_i (Psi(y_i) - Psi(s_i) - <A* g_i, s_i - y_i>) - D_h(s_i, s_{i-1})
  CompensatedSum Sgrad; ///< sum t_i D(x_i, y_i, s_i, theta_i) / theta_i - D_h(s_i, s_{i-1})

  /// CGgap_k, maintained for h == 0 with y_k = x_k.
  std::optional<double> cggap;

  double last_t = 0.0;
  double last_theta = 0.0;

  double total_step() const { return T.value(); }
};

/// Everything computed for one candidate step t at the current state. Backtracking
/// evaluates several candidates and commits the accepted one.
struct StepEvaluation {
  double t = 0.0;
  double theta = 0.0;
  Vector y;
  Vector Ay;
  double f_y = 0.0;
  double psi_y = 0.0;
  Vector g;  ///< g_k in df(A y_k)
  Vector c;  ///< A* g_k
  ProxResult prox;
  Vector As;
  double f_s = 0.0;
  double psi_s = 0.0;
  Vector x_next;
  double objective_next = 0.0;  ///< f(A x_{k+1}) + Psi(x_{k+1})
  double bregman_step = 0.0;    ///< D_h(s_k, s_{k-1})
  double script_D = 0.0;        ///< D(x_k, y_k, s_k, theta_k)
  double script_D_scale = 0.0;  ///< sum of magnitudes entering script_D, for rounding bounds
  double sub_term = 0.0;
  double grad_term = 0.0;  ///< t D / theta - D_h(s_k, s_{k-1}), the eps_k of the descent condition
};

struct Certificate {
  double primal = 0.0;
  double dual_surrogate = 0.0;
  double gap = 0.0;
  double delta = 0.0;
  /// primal + f*(u_k) + Psi*(-A* u_k), the unperturbed Fenchel gap (may be +inf).
  double fenchel_gap = 0.0;
  double thm1_lhs = 0.0;
  double thm1_rhs = 0.0;
  double thm2_lhs = 0.0;
  double thm2_rhs = 0.0;
  double thm1_residual = 0.0;  ///< |lhs - rhs| / max(1, |rhs|)
  double thm2_residual = 0.0;
  std::optional<double> bound;
};

/// k = 0, all sums zero, x = z = s_prev = s_anchor = feasible_start.
/// Throws ConfigError for an infeasible start.
EngineState init(const ProblemInstance& instance);

StepEvaluation evaluate_step(const EngineState& state, const ProblemInstance& instance, YSelector ysel,
                             double t);

void commit_step(EngineState& state, const ProblemInstance& instance, const StepEvaluation& step);

/// One step of the meta-algorithm with a given t.
void iterate(EngineState& state, const ProblemInstance& instance, YSelector ysel, double t);

/// d_k*(-w_k) in closed form; 0 when h == 0. Requires k >= 1.
double d_conjugate(const EngineState& state, const ProblemInstance& instance);

/// Certificate for k >= 1. Throws ConjugateUnavailable when f* or Psi* has
/// no closed form for the instance.
Certificate certificate(const EngineState& state, const ProblemInstance& instance, CertificateMode mode);

/// D(x, y, s, theta) = (f.A+Psi)(x + theta(s-x)) - (1-theta)(f.A+Psi)(x)
///                   - theta (f.A+Psi)(s) + theta D_{f.A}(s, y)
/// with D_{f.A}(s, y) = f(As) - f(Ay) - <g, A(s - y)> and g in df(Ay).
double script_D(const ProblemInstance& instance, const Vector& x, const Vector& y, const Vector& g,
                const Vector& s, double theta);

/// D(x, s, theta) = D_{f.A}(x + theta(s-x), x) + Psi(x + theta(s-x))
///                - (1-theta) Psi(x) - theta Psi(s), with g in df(Ax).
double simple_D(const ProblemInstance& instance, const Vector& x, const Vector& g, const Vector& s,
                double theta);

/// CGgap_{k+1} = (1 - theta_k) CGgap_k + D(x_k, s_k, theta_k).
double cggap_update(double cggap, double d_value, double theta);

/// Relative residual |lhs - rhs| / max(1, |rhs|).
double relative_residual(double lhs, double rhs);

}  // namespace fom
