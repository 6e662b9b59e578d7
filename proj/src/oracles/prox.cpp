#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "fom/errors.hpp"
#include "fom/prox.hpp"

namespace fom {
namespace {

// Smallest coordinate accepted from the multiplicative updates.
constexpr double kMinCoordinate = 1e-300;

[[noreturn]] void unsupported(const ReferenceOracle& h, const SimpleOracle& psi) {
  throw UnsupportedPair("no prox solver registered for (h=" + h.name() + ", Psi=" + psi.name() + ")");
}

ProxResult euclidean(const SimpleOracle& psi, const Vector& c, double t, const Vector& s_prev) {
  const std::size_t n = c.size();
  const Vector v = lincomb(1.0, s_prev, -t, c);
  const auto& rep = psi.representation();

  if (std::holds_alternative<ZeroPsi>(rep)) return {v, Vector(n)};

  if (const auto* p = std::get_if<L1NormPsi>(&rep)) {
    const double tau = t * p->lambda;
    Vector s(n), g(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double mag = std::abs(v[i]) - tau;
      if (mag > 0.0) {
        s[i] = std::copysign(mag, v[i]);
        g[i] = std::copysign(p->lambda, v[i]);
      } else {
        g[i] = std::clamp(v[i] / t, -p->lambda, p->lambda);
      }
    }
    return {std::move(s), std::move(g)};
  }

  Vector s(n);
  if (const auto* p = std::get_if<BoxPsi>(&rep)) {
    for (std::size_t i = 0; i < n; ++i) s[i] = std::clamp(v[i], p->lo[i], p->hi[i]);
  } else if (std::holds_alternative<SimplexPsi>(rep)) {
    // Projection commutes with shifts along the all-ones direction; shifting
    // c by min c avoids cancellation in s_prev - t c for large t.
    const double cmin = *std::min_element(c.begin(), c.end());
    Vector w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = s_prev[i] - t * (c[i] - cmin);
    s = project_simplex(w);
    Vector g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = (w[i] - s[i]) / t - cmin;
    return {std::move(s), std::move(g)};
  } else {
    unsupported(ReferenceOracle(ReferenceKind::SquaredEuclidean), psi);
  }
  Vector g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = (v[i] - s[i]) / t;
  return {std::move(s), std::move(g)};
}

ProxResult entropy(const SimpleOracle& psi, const Vector& c, double t, const Vector& s_prev) {
  if (!std::holds_alternative<SimplexPsi>(psi.representation()))
    unsupported(ReferenceOracle(ReferenceKind::Entropy), psi);
  const std::size_t n = c.size();
  // Shifting c by a constant leaves the simplex step unchanged; shifting by
  // min c keeps t c from swamping log s_prev when t is large.
  const double cmin = *std::min_element(c.begin(), c.end());
  Vector a(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(s_prev[i] > 0.0)) throw DomainError("entropy prox: s_prev must be strictly positive");
    a[i] = std::log(s_prev[i]) - t * (c[i] - cmin);
  }
  const double amax = *std::max_element(a.begin(), a.end());
  Vector s(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += (s[i] = std::exp(a[i] - amax));
  for (std::size_t i = 0; i < n; ++i) {
    s[i] /= acc;
    if (!(s[i] >= kMinCoordinate))
      throw DomainError("entropy prox: coordinate " + std::to_string(i) + " underflowed below 1e-300");
  }
  // log s = log s_prev - t c - (lse - t cmin) with lse = amax + log acc, so
  // g_psi is the constant lse / t - cmin, a normal vector of the simplex.
  const double lse = amax + std::log(acc);
  return {std::move(s), Vector(n, lse / t - cmin)};
}

ProxResult burg(const SimpleOracle& psi, const Vector& c, double t, const Vector& s_prev) {
  const std::size_t n = c.size();
  const auto& rep = psi.representation();
  const auto* box = std::get_if<BoxPsi>(&rep);
  if (!box && !std::holds_alternative<ZeroPsi>(rep)) unsupported(ReferenceOracle(ReferenceKind::Burg), psi);
  if (box) {
    for (double lo : box->lo)
      if (!(lo > 0.0)) throw UnsupportedPair("burg prox: box lower bounds must be positive");
  }
  Vector s(n), g(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(s_prev[i] > 0.0)) throw DomainError("burg prox: s_prev must be strictly positive");
    // Coordinate objective t c s - log s + s / s_prev is convex with
    // derivative a - 1/s.
    const double a = t * c[i] + 1.0 / s_prev[i];
    if (!box) {
      if (!(a > 0.0))
        throw NotAdmissible("burg prox: subproblem unbounded below in coordinate " + std::to_string(i));
      s[i] = 1.0 / a;
      continue;
    }
    const double lo = box->lo[i];
    const double hi = box->hi[i];
    if (a > 0.0 && 1.0 / a > lo && 1.0 / a < hi) {
      s[i] = 1.0 / a;
    } else {
      s[i] = (a > 0.0 && 1.0 / a <= lo) ? lo : hi;
      g[i] = (1.0 / s[i] - a) / t;
    }
  }
  return {std::move(s), std::move(g)};
}

}  // namespace

bool has_prox_solver(const ReferenceOracle& h, const SimpleOracle& psi) {
  const auto& rep = psi.representation();
  switch (h.kind()) {
    case ReferenceKind::Zero: return true;
    case ReferenceKind::SquaredEuclidean: return !std::holds_alternative<L1BallPsi>(rep);
    case ReferenceKind::Entropy: return std::holds_alternative<SimplexPsi>(rep);
    case ReferenceKind::Burg:
      return std::holds_alternative<ZeroPsi>(rep) || std::holds_alternative<BoxPsi>(rep);
  }
  return false;
}

ProxResult prox_step(const ReferenceOracle& h, const SimpleOracle& psi, const Vector& c, double t,
                     const Vector& s_prev) {
  require_same_size(c, s_prev, "prox_step");
  if (c.size() != psi.dimension()) throw DimensionMismatch("prox_step: Psi dimension");
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("prox_step: step size must be positive");
  require_finite(c, "prox_step c");
  switch (h.kind()) {
    case ReferenceKind::Zero: {
      Vector s = psi.linmin(c);
      Vector g(c.size());
      for (std::size_t i = 0; i < c.size(); ++i) g[i] = -c[i];
      return {std::move(s), std::move(g)};
    }
    case ReferenceKind::SquaredEuclidean: return euclidean(psi, c, t, s_prev);
    case ReferenceKind::Entropy: return entropy(psi, c, t, s_prev);
    case ReferenceKind::Burg: return burg(psi, c, t, s_prev);
  }
  unsupported(h, psi);
}

ProxResult prox_step(const ProblemInstance& instance, const Vector& c, double t, const Vector& s_prev) {
  return prox_step(instance.h, instance.psi, c, t, s_prev);
}

double prox_optimality_residual(const ReferenceOracle& h, const Vector& c, double t, const Vector& s_prev,
                                const ProxResult& result) {
  if (h.is_zero()) return norm_inf(c + result.g_psi) * t;
  const Vector gs = h.gradient(result.s);
  const Vector gp = h.gradient(s_prev);
  double worst = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i)
    worst = std::max(worst, std::abs(t * (c[i] + result.g_psi[i]) + gs[i] - gp[i]));
  return worst;
}

Vector project_simplex(const Vector& v) {
  const std::size_t n = v.size();
  std::vector<double> u(v.begin(), v.end());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0;
  double tau = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    cumulative += u[j];
    const double candidate = (cumulative - 1.0) / static_cast<double>(j + 1);
    if (u[j] - candidate > 0.0) tau = candidate;
  }
  Vector s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = std::max(v[i] - tau, 0.0);
  return s;
}

}  // namespace fom
