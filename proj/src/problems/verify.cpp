#include <algorithm>
#include <cmath>

#include "fom/detail/overloaded.hpp"
#include "fom/errors.hpp"
#include "fom/problems.hpp"
#include "fom/rng.hpp"

namespace fom {
namespace {

// Sampling keeps this relative distance from the boundary of the simplex or box.
constexpr double kBoundaryMargin = 1e-3;
constexpr double kTinyDenominator = 1e-300;

class DomainSampler {
 public:
  DomainSampler(const ProblemInstance& inst, SplitMix64& rng) : inst_(inst), rng_(rng) {
    if (inst.known_optimum && inst.known_optimum->point) center_ = *inst.known_optimum->point;
  }

  Vector draw() {
    return std::visit(detail::overloaded{
                          [&](const SimplexPsi& p) { return simplex(p.dim); },
                          [&](const BoxPsi& p) { return box(p); },
                          [&](const L1BallPsi& p) { return ball(p); },
                          [&](const auto&) { return free(); },
                      },
                      inst_.psi.representation());
  }

 private:
  Vector simplex(std::size_t n) {
    Vector x(n);
    const bool sparse = rng_.uniform() < 0.3;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = -std::log(1.0 - rng_.uniform());
      if (sparse && rng_.uniform() < 0.7) x[i] *= 1e-6;
    }
    x *= 1.0 / sum(x);
    const double floor = kBoundaryMargin / static_cast<double>(n);
    for (double& v : x) v = floor + (1.0 - floor * static_cast<double>(n)) * v;
    return x;
  }

  Vector box(const BoxPsi& p) {
    const std::size_t n = p.lo.size();
    Vector x(n);
    const bool near = center_ && rng_.uniform() < 0.5;
    const double spread = near ? std::pow(10.0, rng_.uniform(-4.0, -1.0)) : 0.0;
    const bool logscale = p.lo[0] > 0.0 && rng_.uniform() < 0.5;
    for (std::size_t i = 0; i < n; ++i) {
      const double margin = kBoundaryMargin * (p.hi[i] - p.lo[i]);
      const double lo = p.lo[i] + margin, hi = p.hi[i] - margin;
      double v;
      if (near) v = (*center_)[i] + spread * rng_.normal();
      else if (logscale) v = std::exp(rng_.uniform(std::log(lo), std::log(hi)));
      else v = rng_.uniform(lo, hi);
      x[i] = std::clamp(v, lo, hi);
    }
    return x;
  }

  Vector ball(const L1BallPsi& p) {
    const std::size_t n = p.dim;
    Vector x(n, 0.0);
    if (rng_.uniform() < 0.3) {
      x[static_cast<std::size_t>(rng_.next() % n)] = rng_.uniform() < 0.5 ? -p.radius : p.radius;
      return x;
    }
    for (std::size_t i = 0; i < n; ++i) x[i] = rng_.normal();
    x *= p.radius * rng_.uniform() / norm1(x);
    return x;
  }

  Vector free() {
    const std::size_t n = inst_.dimension();
    Vector x(n);
    const bool near = center_ && rng_.uniform() < 0.5;
    const double spread = near ? std::pow(10.0, rng_.uniform(-4.0, 0.0)) : 2.0;
    for (std::size_t i = 0; i < n; ++i) x[i] = (near ? (*center_)[i] : 0.0) + spread * rng_.normal();
    return x;
  }

  const ProblemInstance& inst_;
  SplitMix64& rng_;
  std::optional<Vector> center_;
};

/// D_{f.A}(y, x) = f(Ay) - f(Ax) - <g, A(y - x)> with g in df(Ax).
double bregman_fA(const ProblemInstance& inst, const Vector& y, const Vector& x) {
  const Vector Ay = inst.A.apply(y);
  const Vector Ax = inst.A.apply(x);
  return inst.f.value(Ay) - inst.f.value(Ax) - dot(inst.f.subgradient(Ax), Ay - Ax);
}

double draw_theta(SplitMix64& rng) {
  const double u = rng.uniform();
  if (u < 0.1) return 1.0;
  if (u < 0.3) return std::pow(10.0, rng.uniform(-4.0, 0.0));
  return 1.0 - rng.uniform();
}

double require(const std::optional<double>& c, const char* what, Condition cond) {
  if (!c) throw ConfigError(condition_name(cond) + " needs a declared " + what);
  return *c;
}

double sample_ratio(const ProblemInstance& inst, Condition cond, DomainSampler& sampler, SplitMix64& rng) {
  const auto& c = inst.constants;
  switch (cond) {
    case Condition::RelativeSmooth: {
      const double L = require(c.L, "L", cond);
      const Vector x = sampler.draw(), y = sampler.draw();
      const double den = L * bregman(inst.h, y, x);
      return den > kTinyDenominator ? bregman_fA(inst, y, x) / den : 0.0;
    }
    case Condition::TriangleSmooth:
    case Condition::HolderSmooth: {
      const Vector x = sampler.draw(), s = sampler.draw(), s_minus = sampler.draw();
      const double theta = draw_theta(rng);
      const double num = bregman_fA(inst, segment_point(x, s, theta), segment_point(x, s_minus, theta));
      const double dh = bregman(inst.h, s, s_minus);
      double den;
      if (cond == Condition::TriangleSmooth) {
        den = require(c.L, "L", cond) * std::pow(theta, require(c.gamma, "gamma", cond)) * dh;
      } else {
        const double M = require(c.M, "M", cond), nu = require(c.nu, "nu", cond);
        den = 2.0 * M * std::pow(theta, 1.0 + nu) * std::pow(dh, (1.0 + nu) / 2.0) / (1.0 + nu);
      }
      return den > kTinyDenominator ? num / den : 0.0;
    }
    case Condition::RelativeContinuity: {
      const double M = require(c.M, "M", cond);
      const Vector x = sampler.draw();
      const Vector g = inst.A.adjoint_apply(inst.f.subgradient(inst.A.apply(x)));
      const double t = std::pow(10.0, rng.uniform(-3.0, 3.0));
      double worst = 0.0;
      auto consider = [&](const Vector& s) {
        if (!inst.h.in_domain(s)) return;
        const double lhs = t * dot(g, s - x) + bregman(inst.h, s, x);
        worst = std::max(worst, -lhs / (M * t * t / 2.0));
      };
      consider(sampler.draw());
      // The Euclidean minimizer over s of the left side.
      if (inst.h.kind() == ReferenceKind::SquaredEuclidean) consider(x - t * g);
      return worst;
    }
    case Condition::Curvature: {
      const double M = require(c.M, "M", cond), nu = require(c.nu, "nu", cond);
      const Vector x = sampler.draw(), s = sampler.draw();
      const double theta = draw_theta(rng);
      const Vector g = inst.f.subgradient(inst.A.apply(x));
      const double den = M * std::pow(theta, 1.0 + nu) / (1.0 + nu);
      return simple_D(inst, x, g, s, theta) / den;
    }
  }
  return 0.0;
}

}  // namespace

bool VerifyReport::passed() const {
  return std::all_of(conditions.begin(), conditions.end(), [](const ConditionReport& c) { return c.passed; });
}

VerifyReport verify_constants(const ProblemInstance& instance, std::size_t samples, std::uint64_t seed) {
  VerifyReport report;
  report.instance = instance.name;
  for (Condition cond : instance.claims) {
    SplitMix64 rng(seed ^ (0x51ed270b27f3a1c9ULL * (static_cast<std::uint64_t>(cond) + 1)));
    DomainSampler sampler(instance, rng);
    ConditionReport cr;
    cr.condition = cond;
    cr.samples = samples;
    for (std::size_t i = 0; i < samples; ++i) cr.max_ratio = std::max(cr.max_ratio, sample_ratio(instance, cond, sampler, rng));
    cr.passed = cr.max_ratio <= 1.0 + kVerifyTolerance;
    report.conditions.push_back(cr);
  }
  return report;
}

ReferenceOptimum reference_optimum(const ProblemInstance& instance, std::size_t budget) {
  if (instance.known_optimum && instance.known_optimum->point) {
    const auto& opt = *instance.known_optimum;
    return {opt.value, *opt.point, opt.value, opt.value};
  }
  MethodConfig config;
  config.iterations = budget;
  if (instance.h.is_zero()) config.method = ConditionalSubgradient{1.0, CGSchedule::LineSearch, {}};
  else if (instance.claims_condition(Condition::TriangleSmooth)) config.method = FastGradient{};
  else if (instance.claims_condition(Condition::RelativeSmooth)) config.method = ProxGradient{};
  else if (instance.claims_condition(Condition::HolderSmooth)) config.method = UniversalGradient{1e-10, {}};
  else config.method = ProxSubgradient{1.0};

  RunOptions options;
  options.tolerance = default_tolerance();
  ProblemInstance copy = instance;
  copy.known_optimum.reset();
  const Trace trace = run(copy, config, options);
  const TraceRow& last = trace.rows.back();
  return {last.primal, trace.final_point, last.primal, last.dual_surrogate};
}

}  // namespace fom
