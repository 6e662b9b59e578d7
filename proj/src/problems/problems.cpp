#include "fom/problems.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "fom/errors.hpp"
#include "fom/rng.hpp"

namespace fom {
namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

RowMatrix to_eigen(const DenseMatrix& m) {
  return Eigen::Map<const RowMatrix>(m.data(), static_cast<Eigen::Index>(m.rows()),
                                     static_cast<Eigen::Index>(m.cols()));
}

DenseMatrix from_eigen(const Eigen::MatrixXd& m) {
  DenseMatrix out(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out(i, j) = m(i, j);
  return out;
}

Vector from_eigen(const Eigen::VectorXd& v) {
  Vector out(static_cast<std::size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = v(i);
  return out;
}

double largest_eigenvalue(const Eigen::MatrixXd& sym) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

/// Largest eigenvalue of B^T B.
double gram_norm(const DenseMatrix& b) {
  const RowMatrix e = to_eigen(b);
  return largest_eigenvalue(e.transpose() * e);
}

Eigen::MatrixXd gaussian(SplitMix64& rng, std::size_t rows, std::size_t cols) {
  Eigen::MatrixXd g(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) g(i, j) = rng.normal();
  return g;
}

/// rows x cols matrix with orthonormal columns.
Eigen::MatrixXd orthonormal(SplitMix64& rng, std::size_t rows, std::size_t cols) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(gaussian(rng, rows, cols));
  return qr.householderQ() * Eigen::MatrixXd::Identity(rows, cols);
}

std::size_t positive(std::optional<std::size_t> v, std::size_t def, const char* what) {
  const std::size_t out = v.value_or(def);
  if (out < 1 || out > 200) throw ConfigError(std::string(what) + " must lie in [1, 200]");
  return out;
}

/// Fields of a ProblemInstance filled in any order; the oracles have no default state.
struct Parts {
  std::string name;
  LinearMap A;
  std::optional<SmoothOracle> f;
  std::optional<SimpleOracle> psi;
  ReferenceOracle h;
  DeclaredConstants constants;
  std::vector<Condition> claims;
  std::optional<KnownOptimum> known_optimum;
  Vector feasible_start;

  ProblemInstance build() && {
    return ProblemInstance{std::move(name),   std::move(A),      std::move(*f),
                           std::move(*psi),   h,                 constants,
                           std::move(claims), std::move(known_optimum), std::move(feasible_start)};
  }
};

void apply_overrides(ProblemInstance& inst, const DeclaredConstants& o) {
  if (o.L) inst.constants.L = o.L;
  if (o.M) inst.constants.M = o.M;
  if (o.nu) inst.constants.nu = o.nu;
  if (o.gamma) inst.constants.gamma = o.gamma;
}

ProblemInstance simplex_quadratic(const InstanceSpec& spec, SplitMix64& rng) {
  const ReferenceKind ref = spec.reference.value_or(ReferenceKind::Entropy);
  if (ref == ReferenceKind::Burg) throw ConfigError("simplex-quadratic: burg reference is not supported");

  Parts inst;
  inst.name = "simplex-quadratic";
  DenseMatrix Q;
  Vector q;
  std::optional<KnownOptimum> optimum;
  if (spec.matrix || spec.vector) {
    if (!spec.matrix || !spec.vector) throw ConfigError("simplex-quadratic: explicit data needs both Q and q");
    Q = *spec.matrix;
    q = *spec.vector;
  } else {
    const std::size_t n = positive(spec.n, 10, "n");
    const Eigen::MatrixXd g = gaussian(rng, n, n);
    const Eigen::MatrixXd qe = g.transpose() * g / static_cast<double>(n) + 0.1 * Eigen::MatrixXd::Identity(n, n);
    Q = from_eigen(qe);
    // Interior minimizer: the gradient at x* is a multiple of the all-ones vector.
    Vector xs(n);
    for (std::size_t i = 0; i < n; ++i) xs[i] = rng.uniform(0.5, 1.5);
    xs *= 1.0 / sum(xs);
    const double mu = rng.uniform(-1.0, 1.0);
    q = Vector(n, mu) - multiply(Q, xs);
    optimum = KnownOptimum{0.5 * dot(xs, multiply(Q, xs)) + dot(q, xs), xs};
  }
  const std::size_t n = q.size();
  if (Q.rows() != n || Q.cols() != n) throw ConfigError("simplex-quadratic: Q must be n x n");

  const double L = largest_eigenvalue(to_eigen(Q));
  inst.A = LinearMap::identity(n);
  inst.f = SmoothOracle::quadratic(Q, q);
  inst.psi = SimpleOracle::simplex(n);
  inst.h = ReferenceOracle(ref);
  inst.feasible_start = Vector(n, 1.0 / static_cast<double>(n));
  inst.known_optimum = optimum;
  if (ref == ReferenceKind::Zero) {
    // The Euclidean diameter of the simplex is sqrt(2).
    inst.constants.M = 2.0 * L;
    inst.constants.nu = 1.0;
    inst.claims = {Condition::Curvature};
  } else {
    inst.constants.L = L;
    inst.constants.gamma = 2.0;
    inst.claims = {Condition::RelativeSmooth, Condition::TriangleSmooth};
  }
  return std::move(inst).build();
}

ProblemInstance lasso(const InstanceSpec& spec, SplitMix64& rng) {
  Parts inst;
  inst.name = "lasso";
  const double lambda = spec.lambda.value_or(1e-3);
  if (!(lambda > 0.0)) throw ConfigError("lasso: lambda must be positive");
  DenseMatrix B;
  Vector b;
  std::optional<KnownOptimum> optimum;
  if (spec.matrix || spec.vector) {
    if (!spec.matrix || !spec.vector) throw ConfigError("lasso: explicit data needs both B and b");
    B = *spec.matrix;
    b = *spec.vector;
  } else {
    const std::size_t n = positive(spec.n, 20, "n");
    const std::size_t m = positive(spec.m, n + 10, "m");
    if (m < n) throw ConfigError("lasso: needs m >= n");
    const double kappa = spec.condition.value_or(1e6);
    if (!(kappa >= 1.0)) throw ConfigError("lasso: condition must be at least 1");
    // B = U diag(sigma) V^T with sigma^2 log-spaced in [1/kappa, 1].
    const Eigen::MatrixXd U = orthonormal(rng, m, n);
    const Eigen::MatrixXd V = orthonormal(rng, n, n);
    Eigen::VectorXd sigma(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double frac = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
      sigma(i) = std::pow(kappa, -0.5 * frac);
    }
    const Eigen::MatrixXd Be = U * sigma.asDiagonal() * V.transpose();
    // x* with a quarter of its entries zero; v is a subgradient of ||.||_1 at x*.
    Eigen::VectorXd xs(n), v(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (rng.uniform() < 0.25) {
        xs(i) = 0.0;
        v(i) = rng.uniform(-0.5, 0.5);
      } else {
        const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
        xs(i) = sign * rng.uniform(0.5, 1.5);
        v(i) = sign;
      }
    }
    // Residual b - B x* = lambda B (B^T B)^{-1} v makes B^T(Bx* - b) + lambda v = 0.
    const Eigen::VectorXd w = sigma.cwiseInverse().asDiagonal() * (V.transpose() * v);
    const Eigen::VectorXd be = Be * xs + lambda * (U * w);
    B = from_eigen(Be);
    b = from_eigen(be);
    optimum = KnownOptimum{0.5 * lambda * lambda * w.squaredNorm() + lambda * xs.lpNorm<1>(), from_eigen(xs)};
  }
  if (B.rows() != b.size()) throw ConfigError("lasso: B rows must match b");
  const std::size_t n = B.cols();
  inst.constants.L = gram_norm(B);
  inst.constants.gamma = 2.0;
  inst.claims = {Condition::RelativeSmooth, Condition::TriangleSmooth};
  inst.A = LinearMap::dense(std::move(B));
  inst.f = SmoothOracle::least_squares(std::move(b));
  inst.psi = SimpleOracle::l1_norm(n, lambda);
  inst.h = ReferenceOracle(ReferenceKind::SquaredEuclidean);
  inst.feasible_start = Vector(n, 0.0);
  inst.known_optimum = optimum;
  return std::move(inst).build();
}

ProblemInstance poisson_burg(const InstanceSpec& spec, SplitMix64& rng) {
  const std::size_t n = positive(spec.n, 10, "n");
  const std::size_t m = positive(spec.m, 30, "m");
  DenseMatrix A(m, n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) A(i, j) = rng.uniform(0.1, 1.0);
  Vector xs(n);
  for (std::size_t j = 0; j < n; ++j) xs[j] = rng.uniform(1.0, 2.0);
  const Vector b = multiply(A, xs);
  // f(Ax*) with Ax* = b; the unconstrained minimizer lies inside the box.
  double opt = 0.0;
  for (double bi : b) opt += bi - bi * std::log(bi);

  Parts inst;
  inst.name = "poisson-burg";
  inst.constants.L = norm1(b);
  inst.claims = {Condition::RelativeSmooth};
  inst.A = LinearMap::dense(std::move(A));
  inst.f = SmoothOracle::poisson(b);
  inst.psi = SimpleOracle::box(n, 0.1, 10.0);
  inst.h = ReferenceOracle(ReferenceKind::Burg);
  inst.feasible_start = Vector(n, 1.0);
  inst.known_optimum = KnownOptimum{opt, xs};
  return std::move(inst).build();
}

/// max over sigma in {-1, 1}^m of ||B^T sigma||^2, by enumeration.
double max_sign_pattern_norm(const DenseMatrix& B) {
  const std::size_t m = B.rows();
  if (m > 24) throw ConfigError("l1-regression: m must be at most 24 for exact enumeration");
  double best = 0.0;
  Vector sigma(m);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
    for (std::size_t i = 0; i < m; ++i) sigma[i] = (mask >> i) & 1 ? 1.0 : -1.0;
    const Vector g = multiply_transposed(B, sigma);
    best = std::max(best, dot(g, g));
  }
  return best;
}

ProblemInstance l1_regression(const InstanceSpec& spec, SplitMix64& rng) {
  const std::size_t n = positive(spec.n, 20, "n");
  const std::size_t m = positive(spec.m, 8, "m");
  DenseMatrix B(m, n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) B(i, j) = scale * rng.normal();
  Vector xs(n);
  for (std::size_t j = 0; j < n; ++j) xs[j] = rng.uniform(-0.5, 0.5);
  const Vector b = multiply(B, xs);

  Parts inst;
  inst.name = "l1-regression";
  inst.constants.M = max_sign_pattern_norm(B);
  inst.claims = {Condition::RelativeContinuity};
  inst.A = LinearMap::dense(std::move(B));
  inst.f = SmoothOracle::l1_residual(b);
  inst.psi = SimpleOracle::box(n, -1.0, 1.0);
  inst.h = ReferenceOracle(ReferenceKind::SquaredEuclidean);
  inst.feasible_start = Vector(n, 0.0);
  inst.known_optimum = KnownOptimum{0.0, xs};
  return std::move(inst).build();
}

ProblemInstance holder(const InstanceSpec& spec, SplitMix64& rng) {
  const std::size_t n = positive(spec.n, 10, "n");
  const std::size_t m = positive(spec.m, 20, "m");
  const double nu = spec.nu.value_or(0.5);
  if (!(nu > 0.0 && nu <= 1.0)) throw ConfigError("holder: nu must lie in (0, 1]");
  DenseMatrix B(m, n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) B(i, j) = scale * rng.normal();
  Vector xs(n);
  for (std::size_t j = 0; j < n; ++j) xs[j] = rng.uniform(-0.5, 0.5);
  const Vector b = multiply(B, xs);

  Parts inst;
  inst.name = "holder";
  // grad of ||y||^(1+nu)/(1+nu) is Holder with constant 2^(1-nu); composing with B
  // and rewriting ||s - s_-||^(1+nu) through D_h gives the factor below.
  const double norm_B = std::sqrt(gram_norm(B));
  inst.constants.M = std::pow(2.0, (1.0 - nu) / 2.0) * std::pow(norm_B, 1.0 + nu);
  inst.constants.nu = nu;
  inst.claims = {Condition::HolderSmooth};
  inst.A = LinearMap::dense(std::move(B));
  inst.f = SmoothOracle::holder_power(b, nu);
  inst.psi = SimpleOracle::box(n, -1.0, 1.0);
  inst.h = ReferenceOracle(ReferenceKind::SquaredEuclidean);
  inst.feasible_start = Vector(n, 0.0);
  inst.known_optimum = KnownOptimum{0.0, xs};
  return std::move(inst).build();
}

ProblemInstance cg_ball(const InstanceSpec& spec, SplitMix64& rng) {
  const double R = spec.radius.value_or(1.0);
  if (!(R > 0.0)) throw ConfigError("cg-ball: radius must be positive");
  Vector c;
  if (spec.vector) {
    c = *spec.vector;
  } else {
    const std::size_t n = positive(spec.n, 20, "n");
    c = Vector(n);
    for (std::size_t i = 0; i < n; ++i) c[i] = rng.uniform(-1.0, 1.0);
    c *= 0.5 * R / norm1(c);
  }
  const std::size_t n = c.size();
  DenseMatrix Q = spec.matrix ? *spec.matrix : DenseMatrix::identity(n);
  if (Q.rows() != n || Q.cols() != n) throw ConfigError("cg-ball: Q must be n x n");
  const double lmax = largest_eigenvalue(to_eigen(Q));
  const Vector q = -1.0 * multiply(Q, c);

  Parts inst;
  inst.name = "cg-ball";
  // Squared Euclidean diameter of the l1-ball is 4 R^2.
  inst.constants.M = 4.0 * R * R * lmax;
  inst.constants.nu = 1.0;
  inst.claims = {Condition::Curvature};
  if (norm1(c) <= R) inst.known_optimum = KnownOptimum{-0.5 * dot(c, multiply(Q, c)), c};
  inst.A = LinearMap::identity(n);
  inst.f = SmoothOracle::quadratic(std::move(Q), q);
  inst.psi = SimpleOracle::l1_ball(n, R);
  inst.h = ReferenceOracle(ReferenceKind::Zero);
  inst.feasible_start = Vector(n, 0.0);
  return std::move(inst).build();
}

}  // namespace

std::vector<std::string> registry_names() {
  return {"simplex-quadratic", "lasso", "poisson-burg", "l1-regression", "holder", "cg-ball"};
}

ProblemInstance make_instance(const InstanceSpec& spec) {
  SplitMix64 rng(spec.seed);
  auto build = [&]() {
    if (spec.name == "simplex-quadratic") return simplex_quadratic(spec, rng);
    if (spec.name == "lasso") return lasso(spec, rng);
    if (spec.name == "poisson-burg") return poisson_burg(spec, rng);
    if (spec.name == "l1-regression") return l1_regression(spec, rng);
    if (spec.name == "holder") return holder(spec, rng);
    if (spec.name == "cg-ball") return cg_ball(spec, rng);
    throw ConfigError("unknown instance '" + spec.name + "'");
  };
  ProblemInstance inst = build();
  if (spec.reference && spec.name != "simplex-quadratic" && *spec.reference != inst.h.kind())
    throw ConfigError(spec.name + ": reference function is fixed to " + inst.h.name());
  apply_overrides(inst, spec.overrides);
  inst.validate();
  return inst;
}

void scale_constants(ProblemInstance& instance, double factor) {
  if (instance.constants.L) *instance.constants.L *= factor;
  if (instance.constants.M) *instance.constants.M *= factor;
}

}  // namespace fom
