#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <cmath>
#include <limits>

#include "fom/detail/overloaded.hpp"
#include "fom/errors.hpp"
#include "fom/oracles.hpp"

namespace fom {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using detail::overloaded;


std::optional<DenseMatrix> cholesky_lower(const DenseMatrix& q) {
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<const RowMajor> m(q.data(), static_cast<Eigen::Index>(q.rows()),
                               static_cast<Eigen::Index>(q.cols()));
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) return std::nullopt;
  const Eigen::MatrixXd l = llt.matrixL();
  DenseMatrix out(q.rows(), q.cols());
  for (std::size_t i = 0; i < q.rows(); ++i)
    for (std::size_t j = 0; j <= i; ++j) out(i, j) = l(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  return out;
}

// Solves L L^T x = r with L lower triangular.
Vector cholesky_solve(const DenseMatrix& l, const Vector& r) {
  const std::size_t n = r.size();
  Vector y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = r[i];
    for (std::size_t j = 0; j < i; ++j) acc -= l(i, j) * y[j];
    y[i] = acc / l(i, i);
  }
  Vector x(n);
  for (std::size_t i = n; i-- > 0;) {
    double acc = y[i];
    for (std::size_t j = i + 1; j < n; ++j) acc -= l(j, i) * x[j];
    x[i] = acc / l(i, i);
  }
  return x;
}

}  // namespace

SmoothOracle SmoothOracle::quadratic(DenseMatrix Q, Vector q) {
  if (Q.rows() != Q.cols() || Q.rows() != q.size())
    throw DimensionMismatch("quadratic: Q must be square and match q");
  auto chol = cholesky_lower(Q);
  return SmoothOracle(QuadraticLoss{std::move(Q), std::move(q), std::move(chol)});
}

SmoothOracle SmoothOracle::least_squares(Vector b) { return SmoothOracle(LeastSquaresLoss{std::move(b)}); }

SmoothOracle SmoothOracle::poisson(Vector b) {
  for (double v : b)
    if (v < 0.0) throw DomainError("poisson: counts must be nonnegative");
  return SmoothOracle(PoissonLoss{std::move(b)});
}

SmoothOracle SmoothOracle::l1_residual(Vector b) { return SmoothOracle(L1ResidualLoss{std::move(b)}); }

SmoothOracle SmoothOracle::holder_power(Vector b, double nu) {
  if (!(nu > 0.0 && nu <= 1.0)) throw DomainError("holder_power: nu must lie in (0, 1]");
  return SmoothOracle(HolderPowerLoss{std::move(b), nu});
}

std::string SmoothOracle::name() const {
  return std::visit(overloaded{
                        [](const QuadraticLoss&) { return std::string("quadratic"); },
                        [](const LeastSquaresLoss&) { return std::string("least_squares"); },
                        [](const PoissonLoss&) { return std::string("poisson"); },
                        [](const L1ResidualLoss&) { return std::string("l1_residual"); },
                        [](const HolderPowerLoss&) { return std::string("holder_power"); },
                    },
                    rep_);
}

std::size_t SmoothOracle::dimension() const {
  return std::visit(overloaded{
                        [](const QuadraticLoss& f) { return f.q.size(); },
                        [](const auto& f) { return f.b.size(); },
                    },
                    rep_);
}

bool SmoothOracle::differentiable() const { return !std::holds_alternative<L1ResidualLoss>(rep_); }

bool SmoothOracle::in_domain(const Vector& y) const {
  if (y.size() != dimension()) return false;
  for (double v : y)
    if (!std::isfinite(v)) return false;
  if (std::holds_alternative<PoissonLoss>(rep_)) {
    for (double v : y)
      if (v <= 0.0) return false;
  }
  return true;
}

double SmoothOracle::value(const Vector& y) const {
  if (!in_domain(y)) throw DomainError("f(" + name() + "): point outside dom f");
  return std::visit(
      overloaded{
          [&](const QuadraticLoss& f) { return 0.5 * dot(y, multiply(f.Q, y)) + dot(f.q, y); },
          [&](const LeastSquaresLoss& f) {
            const Vector r = y - f.b;
            return 0.5 * dot(r, r);
          },
          [&](const PoissonLoss& f) {
            double acc = 0.0;
            for (std::size_t i = 0; i < y.size(); ++i) {
              acc += y[i];
              if (f.b[i] != 0.0) acc -= f.b[i] * std::log(y[i]);
            }
            return acc;
          },
          [&](const L1ResidualLoss& f) { return norm1(y - f.b); },
          [&](const HolderPowerLoss& f) {
            return std::pow(norm2(y - f.b), 1.0 + f.nu) / (1.0 + f.nu);
          },
      },
      rep_);
}

Vector SmoothOracle::subgradient(const Vector& y) const {
  if (!in_domain(y)) throw DomainError("subgradient of " + name() + ": point outside dom f");
  return std::visit(overloaded{
                        [&](const QuadraticLoss& f) { return multiply(f.Q, y) + f.q; },
                        [&](const LeastSquaresLoss& f) { return y - f.b; },
                        [&](const PoissonLoss& f) {
                          Vector g(y.size());
                          for (std::size_t i = 0; i < y.size(); ++i) g[i] = 1.0 - f.b[i] / y[i];
                          return g;
                        },
                        [&](const L1ResidualLoss& f) {
                          Vector g(y.size());
                          for (std::size_t i = 0; i < y.size(); ++i) {
                            const double r = y[i] - f.b[i];
                            g[i] = r > 0.0 ? 1.0 : (r < 0.0 ? -1.0 : 0.0);
                          }
                          return g;
                        },
                        [&](const HolderPowerLoss& f) {
                          Vector r = y - f.b;
                          const double nr = norm2(r);
                          if (nr == 0.0) return Vector(y.size());
                          r *= std::pow(nr, f.nu - 1.0);
                          return r;
                        },
                    },
                    rep_);
}

double SmoothOracle::conjugate(const Vector& u) const {
  if (u.size() != dimension()) throw DimensionMismatch("conjugate: dimension");
  return std::visit(
      overloaded{
          [&](const QuadraticLoss& f) {
            if (!f.chol) throw ConjugateUnavailable("quadratic conjugate needs positive definite Q");
            const Vector r = u - f.q;
            return 0.5 * dot(r, cholesky_solve(*f.chol, r));
          },
          [&](const LeastSquaresLoss& f) { return 0.5 * dot(u, u) + dot(f.b, u); },
          [&](const PoissonLoss& f) {
            double acc = 0.0;
            for (std::size_t i = 0; i < u.size(); ++i) {
              if (f.b[i] == 0.0) {
                if (u[i] > 1.0) return kInf;
                continue;
              }
              if (u[i] >= 1.0) return kInf;
              acc += -f.b[i] + f.b[i] * std::log(f.b[i] / (1.0 - u[i]));
            }
            return acc;
          },
          [&](const L1ResidualLoss& f) {
            if (norm_inf(u) > 1.0 + kFeasibilityTol) return kInf;
            return dot(f.b, u);
          },
          [&](const HolderPowerLoss& f) {
            const double q = (1.0 + f.nu) / f.nu;
            return std::pow(norm2(u), q) / q + dot(f.b, u);
          },
      },
      rep_);
}

}  // namespace fom
