#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fom/detail/overloaded.hpp"
#include "fom/errors.hpp"
#include "fom/oracles.hpp"

namespace fom {
namespace {

using detail::overloaded;

constexpr double kInf = std::numeric_limits<double>::infinity();

double slack(double scale) { return kFeasibilityTol * std::max(1.0, std::abs(scale)); }

void require_dim(const Vector& x, std::size_t dim, const char* what) {
  if (x.size() != dim) {
    throw DimensionMismatch(std::string(what) + ": expected dimension " + std::to_string(dim) +
                            ", got " + std::to_string(x.size()));
  }
}

}  // namespace

SimpleOracle SimpleOracle::zero(std::size_t dim) { return SimpleOracle(ZeroPsi{dim}); }

SimpleOracle SimpleOracle::l1_norm(std::size_t dim, double lambda) {
  if (!(lambda >= 0.0)) throw DomainError("l1_norm: lambda must be nonnegative");
  return SimpleOracle(L1NormPsi{dim, lambda});
}

SimpleOracle SimpleOracle::box(Vector lo, Vector hi) {
  require_same_size(lo, hi, "box");
  for (std::size_t i = 0; i < lo.size(); ++i)
    if (!(lo[i] <= hi[i])) throw DomainError("box: lo must not exceed hi");
  return SimpleOracle(BoxPsi{std::move(lo), std::move(hi)});
}

SimpleOracle SimpleOracle::box(std::size_t dim, double lo, double hi) {
  return box(Vector(dim, lo), Vector(dim, hi));
}

SimpleOracle SimpleOracle::simplex(std::size_t dim) {
  if (dim == 0) throw DomainError("simplex: dimension must be positive");
  return SimpleOracle(SimplexPsi{dim});
}

SimpleOracle SimpleOracle::l1_ball(std::size_t dim, double radius) {
  if (dim == 0 || !(radius > 0.0)) throw DomainError("l1_ball: need dim > 0 and radius > 0");
  return SimpleOracle(L1BallPsi{dim, radius});
}

std::string SimpleOracle::name() const {
  return std::visit(overloaded{
                        [](const ZeroPsi&) { return std::string("zero"); },
                        [](const L1NormPsi&) { return std::string("l1_norm"); },
                        [](const BoxPsi&) { return std::string("box"); },
                        [](const SimplexPsi&) { return std::string("simplex"); },
                        [](const L1BallPsi&) { return std::string("l1_ball"); },
                    },
                    rep_);
}

std::size_t SimpleOracle::dimension() const {
  return std::visit(overloaded{
                        [](const BoxPsi& p) { return p.lo.size(); },
                        [](const auto& p) { return p.dim; },
                    },
                    rep_);
}

bool SimpleOracle::is_indicator() const {
  return !std::holds_alternative<ZeroPsi>(rep_) && !std::holds_alternative<L1NormPsi>(rep_);
}

bool SimpleOracle::contains(const Vector& x) const { return std::isfinite(value(x)); }

double SimpleOracle::value(const Vector& x) const {
  require_dim(x, dimension(), "Psi value");
  for (double v : x)
    if (!std::isfinite(v)) return kInf;
  return std::visit(overloaded{
                        [&](const ZeroPsi&) { return 0.0; },
                        [&](const L1NormPsi& p) { return p.lambda * norm1(x); },
                        [&](const BoxPsi& p) {
                          for (std::size_t i = 0; i < x.size(); ++i) {
                            if (x[i] < p.lo[i] - slack(p.lo[i]) || x[i] > p.hi[i] + slack(p.hi[i]))
                              return kInf;
                          }
                          return 0.0;
                        },
                        [&](const SimplexPsi&) {
                          double total = 0.0;
                          for (double v : x) {
                            if (v < -kFeasibilityTol) return kInf;
                            total += v;
                          }
                          return std::abs(total - 1.0) <= kFeasibilityTol * static_cast<double>(x.size())
                                     ? 0.0
                                     : kInf;
                        },
                        [&](const L1BallPsi& p) {
                          return norm1(x) <= p.radius + slack(p.radius) ? 0.0 : kInf;
                        },
                    },
                    rep_);
}

double SimpleOracle::conjugate(const Vector& v) const {
  require_dim(v, dimension(), "Psi conjugate");
  return std::visit(overloaded{
                        [&](const ZeroPsi&) { return norm_inf(v) <= kFeasibilityTol ? 0.0 : kInf; },
                        [&](const L1NormPsi& p) {
                          return norm_inf(v) <= p.lambda + slack(p.lambda) ? 0.0 : kInf;
                        },
                        [&](const BoxPsi& p) {
                          double acc = 0.0;
                          for (std::size_t i = 0; i < v.size(); ++i)
                            acc += std::max(v[i] * p.lo[i], v[i] * p.hi[i]);
                          return acc;
                        },
                        [&](const SimplexPsi&) { return *std::max_element(v.begin(), v.end()); },
                        [&](const L1BallPsi& p) { return p.radius * norm_inf(v); },
                    },
                    rep_);
}

Vector SimpleOracle::linmin(const Vector& c) const {
  require_dim(c, dimension(), "linmin");
  const std::size_t n = c.size();
  return std::visit(
      overloaded{
          [&](const ZeroPsi&) {
            if (norm_inf(c) != 0.0) throw NotAdmissible("linmin: <c, s> unbounded below over E");
            return Vector(n);
          },
          [&](const L1NormPsi& p) {
            if (norm_inf(c) > p.lambda)
              throw NotAdmissible("linmin: <c, s> + lambda ||s||_1 unbounded below");
            return Vector(n);
          },
          [&](const BoxPsi& p) {
            Vector s(n);
            for (std::size_t i = 0; i < n; ++i) s[i] = c[i] < 0.0 ? p.hi[i] : p.lo[i];
            return s;
          },
          [&](const SimplexPsi&) {
            Vector s(n);
            s[static_cast<std::size_t>(std::min_element(c.begin(), c.end()) - c.begin())] = 1.0;
            return s;
          },
          [&](const L1BallPsi& p) {
            // Vertices ordered +R e_0, -R e_0, +R e_1, ...; the first one
            // attaining min <c, v> = -R max|c_i| wins.
            std::size_t best = 0;
            for (std::size_t i = 1; i < n; ++i)
              if (std::abs(c[i]) > std::abs(c[best])) best = i;
            Vector s(n);
            s[best] = c[best] > 0.0 ? -p.radius : p.radius;
            return s;
          },
      },
      rep_);
}

Vector SimpleOracle::subgradient(const Vector& x) const {
  require_dim(x, dimension(), "Psi subgradient");
  if (!contains(x)) throw DomainError("Psi subgradient: point outside dom Psi");
  if (const auto* p = std::get_if<L1NormPsi>(&rep_)) {
    Vector g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
      g[i] = x[i] > 0.0 ? p->lambda : (x[i] < 0.0 ? -p->lambda : 0.0);
    return g;
  }
  return Vector(x.size());
}

}  // namespace fom
