#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fom/errors.hpp"
#include "fom/oracles.hpp"

namespace fom {

std::string ReferenceOracle::name() const {
  switch (kind_) {
    case ReferenceKind::SquaredEuclidean: return "euclidean";
    case ReferenceKind::Entropy: return "entropy";
    case ReferenceKind::Burg: return "burg";
    case ReferenceKind::Zero: return "zero";
  }
  return "unknown";
}

std::optional<ReferenceKind> parse_reference_kind(const std::string& name) {
  if (name == "euclidean" || name == "squared_euclidean") return ReferenceKind::SquaredEuclidean;
  if (name == "entropy") return ReferenceKind::Entropy;
  if (name == "burg") return ReferenceKind::Burg;
  if (name == "zero") return ReferenceKind::Zero;
  return std::nullopt;
}

bool ReferenceOracle::in_domain(const Vector& x) const {
  for (double v : x) {
    if (!std::isfinite(v)) return false;
    if ((kind_ == ReferenceKind::Entropy || kind_ == ReferenceKind::Burg) && !(v > 0.0)) return false;
  }
  return true;
}

double ReferenceOracle::value(const Vector& x) const {
  switch (kind_) {
    case ReferenceKind::SquaredEuclidean: return 0.5 * dot(x, x);
    case ReferenceKind::Zero: return 0.0;
    case ReferenceKind::Entropy: {
      double acc = 0.0;
      for (double v : x) {
        if (v < 0.0) throw DomainError("entropy: negative coordinate");
        if (v > 0.0) acc += v * std::log(v);
      }
      return acc;
    }
    case ReferenceKind::Burg: {
      double acc = 0.0;
      for (double v : x) {
        if (!(v > 0.0)) throw DomainError("burg: nonpositive coordinate");
        acc -= std::log(v);
      }
      return acc;
    }
  }
  return 0.0;
}

Vector ReferenceOracle::gradient(const Vector& x) const {
  if (!in_domain(x)) throw DomainError("grad h (" + name() + "): point outside domain");
  Vector g(x.size());
  switch (kind_) {
    case ReferenceKind::SquaredEuclidean: return x;
    case ReferenceKind::Zero: return g;
    case ReferenceKind::Entropy:
      for (std::size_t i = 0; i < x.size(); ++i) g[i] = std::log(x[i]) + 1.0;
      return g;
    case ReferenceKind::Burg:
      for (std::size_t i = 0; i < x.size(); ++i) g[i] = -1.0 / x[i];
      return g;
  }
  return g;
}

// Closed forms of h(s) - h(z) - <grad h(z), s - z>, free of the cancellation
// in the literal definition.
double bregman(const ReferenceOracle& h, const Vector& s, const Vector& z) {
  require_same_size(s, z, "bregman");
  switch (h.kind()) {
    case ReferenceKind::Zero: return 0.0;
    case ReferenceKind::SquaredEuclidean: {
      const Vector d = s - z;
      return 0.5 * dot(d, d);
    }
    case ReferenceKind::Entropy: {
      if (!h.in_domain(z)) throw DomainError("bregman(entropy): z must be strictly positive");
      double acc = 0.0;
      for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] < 0.0 || !std::isfinite(s[i])) throw DomainError("bregman(entropy): s outside domain");
        acc += (s[i] > 0.0 ? s[i] * std::log(s[i] / z[i]) : 0.0) - s[i] + z[i];
      }
      return acc;
    }
    case ReferenceKind::Burg: {
      if (!h.in_domain(z) || !h.in_domain(s)) throw DomainError("bregman(burg): nonpositive coordinate");
      double acc = 0.0;
      for (std::size_t i = 0; i < s.size(); ++i) {
        const double r = s[i] / z[i];
        acc += (r - 1.0) - std::log(r);
      }
      return acc;
    }
  }
  return 0.0;
}

double fenchel_conjugate_at_subgradient(double value, const Vector& point, const Vector& g) {
  return dot(g, point) - value;
}

std::string condition_name(Condition c) {
  switch (c) {
    case Condition::RelativeSmooth: return "relative_smooth";
    case Condition::RelativeContinuity: return "relative_continuity";
    case Condition::TriangleSmooth: return "triangle_smooth";
    case Condition::HolderSmooth: return "holder_smooth";
    case Condition::Curvature: return "curvature";
  }
  return "unknown";
}

double ProblemInstance::objective(const Vector& x) const {
  const double psi_x = psi.value(x);
  if (!std::isfinite(psi_x)) return std::numeric_limits<double>::infinity();
  return f.value(A.apply(x)) + psi_x;
}

void ProblemInstance::validate() const {
  const std::size_t n = A.input_dim();
  if (f.dimension() != A.output_dim()) throw ConfigError(name + ": dim f != rows of A");
  if (psi.dimension() != n) throw ConfigError(name + ": dim Psi != cols of A");
  if (feasible_start.size() != n) throw ConfigError(name + ": start has wrong dimension");
  if (!psi.contains(feasible_start)) throw ConfigError(name + ": start outside dom Psi");
  if (!h.in_domain(feasible_start)) throw ConfigError(name + ": start outside dom h");
}

bool ProblemInstance::claims_condition(Condition c) const {
  return std::find(claims.begin(), claims.end(), c) != claims.end();
}

}  // namespace fom
