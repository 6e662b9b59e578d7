#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include "doctest.h"
#include "fom/errors.hpp"
#include "fom/oracles.hpp"
#include "fom/prox.hpp"
#include "support.hpp"

using namespace fom;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// D_h written out per kind, independent of bregman().
double bregman_by_hand(ReferenceKind kind, const Vector& s, const Vector& z) {
  double acc = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    switch (kind) {
      case ReferenceKind::SquaredEuclidean: acc += 0.5 * (s[i] - z[i]) * (s[i] - z[i]); break;
      case ReferenceKind::Entropy: acc += (s[i] > 0 ? s[i] * std::log(s[i] / z[i]) : 0.0) - s[i] + z[i]; break;
      case ReferenceKind::Burg: acc += s[i] / z[i] - std::log(s[i] / z[i]) - 1.0; break;
      case ReferenceKind::Zero: break;
    }
  }
  return acc;
}

struct ProxCase {
  const char* label;
  ReferenceOracle h;
  SimpleOracle psi;
  std::function<Vector(SplitMix64&)> anchor;  // s_prev in dom h and dom Psi
};

std::vector<ProxCase> registered_pairs(std::size_t n) {
  using K = ReferenceKind;
  auto gauss = [n](SplitMix64& r) { return test::gaussian(r, n); };
  auto in_box = [n](SplitMix64& r) { return test::uniform(r, n, -1.0, 2.0); };
  auto simplex = [n](SplitMix64& r) { return test::simplex_point(r, n); };
  auto positive = [n](SplitMix64& r) { return test::uniform(r, n, 0.2, 5.0); };
  auto ball = [n](SplitMix64& r) {
    Vector v = test::gaussian(r, n);
    return (0.9 / norm1(v)) * v;
  };
  return {
      {"euclidean/zero", ReferenceOracle(K::SquaredEuclidean), SimpleOracle::zero(n), gauss},
      {"euclidean/l1", ReferenceOracle(K::SquaredEuclidean), SimpleOracle::l1_norm(n, 0.3), gauss},
      {"euclidean/box", ReferenceOracle(K::SquaredEuclidean), SimpleOracle::box(n, -1.0, 2.0), in_box},
      {"euclidean/simplex", ReferenceOracle(K::SquaredEuclidean), SimpleOracle::simplex(n), simplex},
      {"entropy/simplex", ReferenceOracle(K::Entropy), SimpleOracle::simplex(n), simplex},
      {"burg/zero", ReferenceOracle(K::Burg), SimpleOracle::zero(n), positive},
      {"burg/box", ReferenceOracle(K::Burg), SimpleOracle::box(n, 0.1, 10.0), positive},
      {"zero/simplex", ReferenceOracle(K::Zero), SimpleOracle::simplex(n), simplex},
      {"zero/box", ReferenceOracle(K::Zero), SimpleOracle::box(n, -1.0, 2.0), in_box},
      {"zero/l1_ball", ReferenceOracle(K::Zero), SimpleOracle::l1_ball(n, 1.0), ball},
  };
}

// Random feasible point of Psi for subgradient-inequality checks.
Vector feasible_sample(const ProxCase& pc, SplitMix64& rng, std::size_t n) {
  if (pc.psi.name() == "zero" || pc.psi.name() == "l1_norm") return test::gaussian(rng, n, 3.0);
  return pc.anchor(rng);
}

}  // namespace

TEST_CASE("bregman distance examples") {
  CHECK(bregman(ReferenceOracle(ReferenceKind::SquaredEuclidean), Vector{1, 0}, Vector{0, 0}) == doctest::Approx(0.5));
  CHECK(bregman(ReferenceOracle(ReferenceKind::Entropy), Vector{0.3, 0.7}, Vector{0.3, 0.7}) == 0.0);
  const double expected = 0.5 * std::log(2.0) + 0.5 * std::log(2.0 / 3.0);
  CHECK(bregman(ReferenceOracle(ReferenceKind::Entropy), Vector{0.5, 0.5}, Vector{0.25, 0.75}) ==
        doctest::Approx(expected).epsilon(1e-12));
  CHECK(expected == doctest::Approx(0.14384).epsilon(1e-4));
  CHECK(bregman(ReferenceOracle(ReferenceKind::Zero), Vector{5, 1}, Vector{0, 2}) == 0.0);
}

TEST_CASE("bregman distance matches per-kind formulas and is nonnegative") {
  SplitMix64 rng(21);
  for (auto kind : {ReferenceKind::SquaredEuclidean, ReferenceKind::Entropy, ReferenceKind::Burg}) {
    const ReferenceOracle h(kind);
    for (int trial = 0; trial < 200; ++trial) {
      const Vector s = test::uniform(rng, 6, 0.01, 3.0), z = test::uniform(rng, 6, 0.01, 3.0);
      const double d = bregman(h, s, z);
      CHECK(d >= 0.0);
      CHECK(d == doctest::Approx(bregman_by_hand(kind, s, z)).epsilon(1e-10));
      CHECK(bregman(h, s, s) == doctest::Approx(0.0));
    }
  }
}

TEST_CASE("entropy allows zero coordinates in the first argument") {
  CHECK(bregman(ReferenceOracle(ReferenceKind::Entropy), Vector{1, 0}, Vector{0.5, 0.5}) ==
        doctest::Approx(std::log(2.0)));
  CHECK_THROWS_AS(bregman(ReferenceOracle(ReferenceKind::Entropy), Vector{0.5, 0.5}, Vector{1, 0}), DomainError);
  CHECK_THROWS_AS(bregman(ReferenceOracle(ReferenceKind::Burg), Vector{0, 1}, Vector{1, 1}), DomainError);
}

TEST_CASE("three-point identity") {
  SplitMix64 rng(5);
  for (auto kind : {ReferenceKind::SquaredEuclidean, ReferenceKind::Entropy, ReferenceKind::Burg}) {
    const ReferenceOracle h(kind);
    for (int trial = 0; trial < 500; ++trial) {
      const Vector x = test::uniform(rng, 5, 0.05, 4.0), y = test::uniform(rng, 5, 0.05, 4.0),
                   z = test::uniform(rng, 5, 0.05, 4.0);
      const double lhs = bregman(h, x, z);
      const double rhs = bregman(h, x, y) + bregman(h, y, z) + dot(h.gradient(y) - h.gradient(z), x - y);
      CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(lhs)));
    }
  }
}

TEST_CASE("reference gradients agree with finite differences") {
  SplitMix64 rng(9);
  for (auto kind : {ReferenceKind::SquaredEuclidean, ReferenceKind::Entropy, ReferenceKind::Burg}) {
    const ReferenceOracle h(kind);
    for (int trial = 0; trial < 20; ++trial) {
      const Vector x = test::uniform(rng, 4, 0.1, 3.0);
      const Vector fd = test::finite_difference_gradient([&](const Vector& v) { return h.value(v); }, x);
      CHECK(test::relative_error(h.gradient(x), fd) <= 1e-5);
    }
  }
}

TEST_CASE("smooth oracle gradients agree with finite differences") {
  SplitMix64 rng(13);
  const std::size_t n = 5;
  const DenseMatrix G = test::gaussian_matrix(rng, n, n);
  DenseMatrix Q = gram(G);
  for (std::size_t i = 0; i < n; ++i) Q(i, i) += 0.1;
  const Vector b = test::uniform(rng, n, 0.5, 2.0);
  const std::vector<SmoothOracle> oracles = {
      SmoothOracle::quadratic(Q, test::gaussian(rng, n)), SmoothOracle::least_squares(test::gaussian(rng, n)),
      SmoothOracle::poisson(b), SmoothOracle::holder_power(test::gaussian(rng, n), 0.5),
      SmoothOracle::holder_power(test::gaussian(rng, n), 1.0)};
  for (const auto& f : oracles) {
    CAPTURE(f.name());
    CHECK(f.differentiable());
    for (int trial = 0; trial < 20; ++trial) {
      const Vector y = test::uniform(rng, n, 0.2, 3.0);
      const Vector fd = test::finite_difference_gradient([&](const Vector& v) { return f.value(v); }, y);
      CHECK(test::relative_error(f.subgradient(y), fd) <= 1e-5);
    }
  }
}

TEST_CASE("subgradient inequality for every smooth oracle") {
  SplitMix64 rng(17);
  const std::size_t n = 4;
  const std::vector<SmoothOracle> oracles = {
      SmoothOracle::least_squares(test::gaussian(rng, n)), SmoothOracle::poisson(test::uniform(rng, n, 0, 2)),
      SmoothOracle::l1_residual(test::gaussian(rng, n)), SmoothOracle::holder_power(test::gaussian(rng, n), 0.3)};
  for (const auto& f : oracles) {
    CAPTURE(f.name());
    for (int trial = 0; trial < 200; ++trial) {
      const Vector y = test::uniform(rng, n, 0.1, 3.0), z = test::uniform(rng, n, 0.1, 3.0);
      CHECK(f.value(z) >= f.value(y) + dot(f.subgradient(y), z - y) - 1e-12 * (1.0 + std::abs(f.value(z))));
    }
  }
}

TEST_CASE("smooth conjugates satisfy Fenchel-Young with equality at subgradients") {
  SplitMix64 rng(23);
  const std::size_t n = 4;
  DenseMatrix Q = gram(test::gaussian_matrix(rng, n, n));
  for (std::size_t i = 0; i < n; ++i) Q(i, i) += 0.5;
  const std::vector<SmoothOracle> oracles = {
      SmoothOracle::quadratic(Q, test::gaussian(rng, n)), SmoothOracle::least_squares(test::gaussian(rng, n)),
      SmoothOracle::poisson(test::uniform(rng, n, 0.5, 2)), SmoothOracle::l1_residual(test::gaussian(rng, n)),
      SmoothOracle::holder_power(test::gaussian(rng, n), 0.6)};
  for (const auto& f : oracles) {
    CAPTURE(f.name());
    for (int trial = 0; trial < 50; ++trial) {
      const Vector y = test::uniform(rng, n, 0.2, 3.0);
      const Vector g = f.subgradient(y);
      const double by_fy = fenchel_conjugate_at_subgradient(f.value(y), y, g);
      CHECK(f.conjugate(g) == doctest::Approx(by_fy).epsilon(1e-9).scale(1.0));
      // Young's inequality at an unrelated point.
      const Vector z = test::uniform(rng, n, 0.2, 3.0);
      CHECK(f.conjugate(g) >= dot(g, z) - f.value(z) - 1e-9);
    }
  }
}

TEST_CASE("conjugate examples at subgradient pairs") {
  CHECK(fenchel_conjugate_at_subgradient(2.0, Vector{2}, Vector{2}) == 2.0);
  CHECK(fenchel_conjugate_at_subgradient(0.0, Vector{1, 0}, Vector{0, -3}) == 0.0);
  CHECK(fenchel_conjugate_at_subgradient(0.0, Vector{0}, Vector{0.5}) == 0.0);
  CHECK(SmoothOracle::least_squares(Vector{0}).conjugate(Vector{2}) == 2.0);
  CHECK(SimpleOracle::simplex(2).conjugate(Vector{0, -3}) == 0.0);
  CHECK(SmoothOracle::l1_residual(Vector{0}).conjugate(Vector{0.5}) == 0.0);
}

TEST_CASE("simple oracle conjugates are support functions") {
  SplitMix64 rng(29);
  const std::size_t n = 5;
  const std::vector<SimpleOracle> psis = {SimpleOracle::simplex(n), SimpleOracle::box(n, -1.0, 2.0),
                                          SimpleOracle::l1_ball(n, 1.5)};
  for (const auto& psi : psis) {
    CAPTURE(psi.name());
    for (int trial = 0; trial < 100; ++trial) {
      const Vector v = test::gaussian(rng, n);
      const Vector best = psi.linmin(-1.0 * v);
      CHECK(psi.contains(best));
      CHECK(psi.conjugate(v) == doctest::Approx(dot(v, best)).epsilon(1e-12));
    }
  }
  CHECK(SimpleOracle::zero(2).conjugate(Vector{0, 0}) == 0.0);
  CHECK(SimpleOracle::zero(2).conjugate(Vector{0, 1e-3}) == kInf);
  CHECK(SimpleOracle::l1_norm(2, 1.0).conjugate(Vector{1.0, -0.5}) == 0.0);
  CHECK(SimpleOracle::l1_norm(2, 1.0).conjugate(Vector{1.1, 0}) == kInf);
}

TEST_CASE("linmin breaks ties at the lowest index") {
  CHECK(SimpleOracle::simplex(3).linmin(Vector{1, 0, 0}) == Vector{0, 1, 0});
  CHECK(SimpleOracle::l1_ball(3, 2.0).linmin(Vector{1, -1, 1}) == Vector{-2, 0, 0});
  CHECK_THROWS_AS(SimpleOracle::zero(2).linmin(Vector{1, 0}), NotAdmissible);
}

TEST_CASE("prox examples") {
  SUBCASE("explicit gradient step") {
    const auto r = prox_step(ReferenceOracle(ReferenceKind::SquaredEuclidean), SimpleOracle::zero(2), Vector{1, -1},
                             0.5, Vector{0, 0});
    CHECK(r.s == Vector{-0.5, 0.5});
    CHECK(r.g_psi == Vector{0, 0});
  }
  SUBCASE("entropy over the simplex") {
    const auto r = prox_step(ReferenceOracle(ReferenceKind::Entropy), SimpleOracle::simplex(2),
                             Vector{std::numbers::ln2, 0}, 1.0, Vector{0.5, 0.5});
    CHECK(r.s[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(r.s[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  }
  SUBCASE("soft threshold") {
    const auto r =
        prox_step(ReferenceOracle(ReferenceKind::SquaredEuclidean), SimpleOracle::l1_norm(1, 1.0), Vector{0}, 0.5,
                  Vector{1.0});
    CHECK(r.s[0] == doctest::Approx(0.5));
  }
  SUBCASE("burg without a lower bound can be unbounded") {
    CHECK_THROWS_AS(prox_step(ReferenceOracle(ReferenceKind::Burg), SimpleOracle::zero(1), Vector{-2}, 1.0,
                              Vector{1.0}),
                    NotAdmissible);
  }
  SUBCASE("entropy has no solver for the l1 norm") {
    CHECK_FALSE(has_prox_solver(ReferenceOracle(ReferenceKind::Entropy), SimpleOracle::l1_norm(2, 1.0)));
    CHECK_THROWS_AS(prox_step(ReferenceOracle(ReferenceKind::Entropy), SimpleOracle::l1_norm(2, 1.0), Vector{0, 0},
                              1.0, Vector{0.5, 0.5}),
                    UnsupportedPair);
  }
}

TEST_CASE("prox optimality conditions on random inputs for every registered pair") {
  const std::size_t n = 6;
  SplitMix64 rng(31);
  for (const auto& pc : registered_pairs(n)) {
    CAPTURE(pc.label);
    REQUIRE(has_prox_solver(pc.h, pc.psi));
    int solved = 0;
    while (solved < 100) {
      const Vector s_prev = pc.anchor(rng);
      const double t = std::exp(rng.uniform(std::log(1e-2), std::log(1e2)));
      Vector c = test::gaussian(rng, n);
      if (pc.h.kind() == ReferenceKind::Burg && pc.psi.name() == "zero") {
        // Admissible iff t c_i + 1/s_prev_i > 0.
        for (std::size_t i = 0; i < n; ++i) c[i] = std::max(c[i], -0.9 / (t * s_prev[i]));
      }
      const ProxResult r = prox_step(pc.h, pc.psi, c, t, s_prev);
      ++solved;
      CHECK(pc.psi.contains(r.s));
      if (pc.h.kind() == ReferenceKind::Burg) CHECK(pc.h.in_domain(r.s));
      const double scale = std::max({1.0, t * norm_inf(c), norm_inf(pc.h.gradient(s_prev))});
      CHECK(prox_optimality_residual(pc.h, c, t, s_prev, r) <= 1e-8 * scale);
      // g_psi is a subgradient of Psi at s.
      for (int probe = 0; probe < 5; ++probe) {
        const Vector v = feasible_sample(pc, rng, n);
        CHECK(pc.psi.value(v) >= pc.psi.value(r.s) + dot(r.g_psi, v - r.s) - 1e-9 * (1.0 + norm1(v - r.s) * norm_inf(r.g_psi)));
      }
      // The prox point beats random feasible competitors on the subproblem objective.
      const double obj = t * (dot(c, r.s) + pc.psi.value(r.s)) + bregman(pc.h, r.s, s_prev);
      for (int probe = 0; probe < 5; ++probe) {
        const Vector v = feasible_sample(pc, rng, n);
        if (!pc.h.in_domain(v) && !pc.h.is_zero()) continue;
        const double other = t * (dot(c, v) + pc.psi.value(v)) + bregman(pc.h, v, s_prev);
        CHECK(obj <= other + 1e-9 * std::max(1.0, std::abs(other)));
      }
    }
  }
}

TEST_CASE("simplex projection") {
  CHECK(project_simplex(Vector{0.5, 0.5}) == Vector{0.5, 0.5});
  const Vector p = project_simplex(Vector{2, 0, -1});
  CHECK(p == Vector{1, 0, 0});
  const Vector q = project_simplex(Vector{0.6, 0.6});
  CHECK(q[0] == doctest::Approx(0.5));
}

TEST_CASE("domain handling") {
  const auto f = SmoothOracle::poisson(Vector{1, 1});
  CHECK_FALSE(f.in_domain(Vector{1, 0}));
  CHECK_THROWS_AS(f.value(Vector{1, -1}), DomainError);
  const auto box = SimpleOracle::box(2, 0.0, 1.0);
  CHECK(box.value(Vector{0.5, 2.0}) == kInf);
  CHECK(box.value(Vector{0.5, 1.0 + 1e-12}) == 0.0);
  CHECK(SimpleOracle::l1_norm(2, 0.5).value(Vector{1, -2}) == doctest::Approx(1.5));
  CHECK_THROWS_AS(SimpleOracle::box(Vector{1, 0}, Vector{0, 1}), DomainError);
}

TEST_CASE("simplex steps stay feasible for huge steps") {
  const Vector s_prev{0.49999999999999994, 0.49999999999999994};
  const Vector c{1.0, 1.0};
  for (auto kind : {ReferenceKind::SquaredEuclidean, ReferenceKind::Entropy}) {
    CAPTURE(static_cast<int>(kind));
    for (double t : {1e10, 1e150, 1e250}) {
      const ReferenceOracle h(kind);
      const ProxResult r = prox_step(h, SimpleOracle::simplex(2), c, t, s_prev);
      CHECK(SimpleOracle::simplex(2).contains(r.s));
      CHECK(r.s[0] == doctest::Approx(0.5));
      CHECK(prox_optimality_residual(h, c, t, s_prev, r) <= 1e-8 * t);
    }
  }
}
