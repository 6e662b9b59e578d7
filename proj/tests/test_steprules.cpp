#include <cmath>

#include "doctest.h"
#include "fom/errors.hpp"
#include "fom/steprules.hpp"
#include "support.hpp"

using namespace fom;

namespace {

ProblemInstance half_square(SimpleOracle psi, ReferenceKind h, Vector start) {
  const std::size_t n = start.size();
  return ProblemInstance{"half-square",
                         LinearMap::identity(n),
                         SmoothOracle::least_squares(Vector(n, 0.0)),
                         std::move(psi),
                         ReferenceOracle(h),
                         {},
                         {},
                         std::nullopt,
                         std::move(start)};
}

}  // namespace

TEST_CASE("theta from step history") {
  CHECK(theta_from_history(1.0, 0.0) == 1.0);
  CHECK(theta_from_history(1.0, 1.0) == 0.5);
  // t = (1, 1, 1): theta_2 / t_2 = (1 - theta_2) theta_1 / t_1.
  const double th1 = theta_from_history(1.0, 1.0), th2 = theta_from_history(1.0, 2.0);
  CHECK(th2 == doctest::Approx(1.0 / 3.0));
  CHECK(th2 / 1.0 == doctest::Approx((1.0 - th2) * th1 / 1.0));
}

TEST_CASE("t from theta") {
  CHECK(t_from_theta(0.5, 1.0) == doctest::Approx(1.0));
  CHECK(t_from_theta(2.0 / 3.0, 1.0) == doctest::Approx(2.0));
  CHECK(t_from_theta(1.0, 0.0) == 1.0);
  CHECK(t_from_theta(1.0, 0.0, 3.0) == 3.0);
  CHECK_THROWS_AS(t_from_theta(1.0, 2.0), DomainError);
  SplitMix64 rng(1);
  for (int i = 0; i < 1000; ++i) {
    const double theta = rng.uniform(1e-6, 1.0 - 1e-6), T = std::exp(rng.uniform(-5, 5));
    CHECK(std::abs(theta_from_history(t_from_theta(theta, T), T) - theta) <= 1e-14);
  }
}

TEST_CASE("conditional gradient theta schedule") {
  CHECK(cg_theta(0, 1.0) == 1.0);
  CHECK(cg_theta(2, 1.0) == doctest::Approx(0.5));
  CHECK(cg_theta(3, 0.5) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("rule validation") {
  CHECK_THROWS_AS(validate_rule(BacktrackSmooth{1.0}), ConfigError);
  CHECK_THROWS_AS(validate_rule(BacktrackUniversal{2.0, 0.0}), ConfigError);
  CHECK_THROWS_AS(validate_rule(FixedT{-1.0}), ConfigError);
  CHECK_THROWS_AS(validate_rule(FixedScheduleT{}), ConfigError);
  CHECK_NOTHROW(validate_rule(BacktrackSmooth{}));
  CHECK_NOTHROW(validate_rule(ThetaScheduleCG{0.5}));
}

TEST_CASE("backtracking on a unit quadratic accepts t = 1") {
  // The descent condition for 1/2 x^2 with Euclidean h holds iff t <= 1.
  const auto inst = half_square(SimpleOracle::zero(1), ReferenceKind::SquaredEuclidean, Vector{1.0});
  const EngineState st = init(inst);

  SUBCASE("shrinking from above") {
    const auto r = backtrack(st, inst, YSelector::ProxPoint, BacktrackSmooth{2.0, 4.0});
    CHECK(r.step.t == 1.0);
    CHECK(r.halvings == 2);
    CHECK(r.r_large_verified);
  }
  SUBCASE("growing from below") {
    const auto r = backtrack(st, inst, YSelector::ProxPoint, BacktrackSmooth{2.0, 0.25});
    CHECK(r.step.t == 1.0);
    CHECK(r.growths == 2);
    CHECK(r.r_large_verified);
  }
  SUBCASE("condition holds analytically exactly for t <= 1") {
    for (double t : {0.125, 0.5, 1.0}) CHECK(descent_condition_holds(evaluate_step(st, inst, YSelector::ProxPoint, t), 0.0));
    for (double t : {1.01, 2.0, 8.0})
      CHECK_FALSE(descent_condition_holds(evaluate_step(st, inst, YSelector::ProxPoint, t), 0.0));
  }
}

TEST_CASE("universal backtracking with generous slack keeps t_init") {
  const auto inst = half_square(SimpleOracle::zero(1), ReferenceKind::SquaredEuclidean, Vector{1.0});
  const EngineState st = init(inst);
  const auto r = backtrack(st, inst, YSelector::ProxPoint, BacktrackUniversal{2.0, 1e6, 4.0, 60, 0});
  CHECK(r.step.t == 4.0);
  CHECK(r.halvings == 0);
}

TEST_CASE("backtracking gives up after the allowed number of shrinks") {
  const auto inst = half_square(SimpleOracle::zero(1), ReferenceKind::SquaredEuclidean, Vector{1.0});
  const EngineState st = init(inst);
  CHECK_THROWS_AS(backtrack(st, inst, YSelector::ProxPoint, BacktrackSmooth{2.0, 1024.0, 3, 0}), BacktrackFailed);
}

TEST_CASE("golden section") {
  const double m = golden_section([](double th) { return (th - 0.3) * (th - 0.3); }, 200, 1e-12);
  CHECK(m == doctest::Approx(0.3).epsilon(1e-6));
  // Flat objective returns the bracket midpoint deterministically.
  const double flat1 = golden_section([](double) { return 0.0; }, 64, 1e-10);
  const double flat2 = golden_section([](double) { return 0.0; }, 64, 1e-10);
  CHECK(flat1 == flat2);
  CHECK(flat1 >= 0.0);
  CHECK(flat1 <= 1.0);
}

TEST_CASE("conditional gradient line search") {
  // 1/2 x^2 on [-1, 1], x = 1, s = -1, CGgap = 2: phi(theta) = 2(1 - theta) + 2 theta^2.
  const auto inst = half_square(SimpleOracle::box(1, -1.0, 1.0), ReferenceKind::Zero, Vector{1.0});
  EngineState st = init(inst);
  st.cggap = 2.0;
  const Vector x{1.0}, s{-1.0};
  const double theta = linesearch_cg(st, inst, x, inst.f.subgradient(x), s);
  CHECK(theta == doctest::Approx(0.5).epsilon(1e-8));

  // Degenerate: zero gap and s = x.
  st.cggap = 0.0;
  const double a = linesearch_cg(st, inst, x, inst.f.subgradient(x), x);
  const double b = linesearch_cg(st, inst, x, inst.f.subgradient(x), x);
  CHECK(a == b);
}

TEST_CASE("fast step ratio bound") {
  CHECK(fast_step_ratio_bound(0, 2.0, 1.0) == doctest::Approx(1.0));
  CHECK(fast_step_ratio_bound(2, 2.0, 1.0) == doctest::Approx(0.25));
  for (double gamma : {1.5, 2.0}) {
    for (double L : {1.0, 10.0}) {
      const auto t = extremal_fast_steps(1001, gamma, L);
      double T = 0.0;
      for (std::size_t k = 0; k < t.size(); ++k) {
        const double theta = theta_from_history(t[k], T);
        // Each step meets 1 / (theta^(gamma-1) t) <= L with equality.
        CHECK(1.0 / (std::pow(theta, gamma - 1.0) * t[k]) <= L * (1.0 + 1e-12));
        CHECK(theta / t[k] <= fast_step_ratio_bound(k, gamma, L) * (1.0 + 1e-12));
        T += t[k];
      }
    }
  }
}

TEST_CASE("weighted AM-GM") {
  CHECK(amgm_check(1, 1, 0.3, 2.0));
  CHECK(amgm_check(1, 3, 1, 1));
  CHECK(amgm_check(4, 1, 1, 1));
  SplitMix64 rng(2);
  for (int i = 0; i < 1000; ++i)
    CHECK(amgm_check(rng.uniform(0, 10), rng.uniform(0, 10), rng.uniform(0.1, 3), rng.uniform(0.1, 3)));
}
