#pragma once

#include "fom/oracles.hpp"

namespace fom {

/// Solution of argmin_s { t(<c, s> + Psi(s)) + D_h(s, s_prev) } together with
/// the subgradient g_psi in dPsi(s) certifying
///   t (c + g_psi) + grad h(s) - grad h(s_prev) = 0.
/// For h == 0 the step is a linear minimization and g_psi = -c.
struct ProxResult {
  Vector s;
  Vector g_psi;
};

/// Whether a closed-form solver is registered for the pair.
bool has_prox_solver(const ReferenceOracle& h, const SimpleOracle& psi);

/// Closed-form Bregman proximal step. Registered pairs:
///   SquaredEuclidean with Zero, L1Norm, Box, Simplex;
///   Entropy with Simplex (multiplicative update in log space);
///   Burg with Zero and positive Box (coordinatewise);
///   Zero with any Psi (linear minimization).
/// Throws NotAdmissible when the subproblem is unbounded below,
/// UnsupportedPair when no solver is registered.
ProxResult prox_step(const ReferenceOracle& h, const SimpleOracle& psi, const Vector& c, double t,
                     const Vector& s_prev);

ProxResult prox_step(const ProblemInstance& instance, const Vector& c, double t,
                     const Vector& s_prev);

/// max_i |t (c + g_psi) + grad h(s) - grad h(s_prev)|, the residual of the
/// first-order optimality conditions. Zero by definition when h == 0.
double prox_optimality_residual(const ReferenceOracle& h, const Vector& c, double t,
                                const Vector& s_prev, const ProxResult& result);

/// Euclidean projection onto the unit simplex (sort based).
Vector project_simplex(const Vector& v);

}  // namespace fom
