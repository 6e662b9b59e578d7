#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fom/linalg.hpp"

namespace fom {

/// Relative slack used when testing membership in dom(Psi).
inline constexpr double kFeasibilityTol = 1e-9;

// ---------------------------------------------------------------------------
// Smooth (or at least subdifferentiable) part f : F -> R u {+inf}
// ---------------------------------------------------------------------------

/// f(y) = 1/2 y'Qy + q'y with Q symmetric positive semidefinite.
struct QuadraticLoss {
  DenseMatrix Q;
  Vector q;
  /// Lower Cholesky factor of Q when Q is positive definite.
  std::optional<DenseMatrix> chol;
};

/// f(y) = 1/2 ||y - b||^2
struct LeastSquaresLoss {
  Vector b;
};

/// f(y) = sum_i (y_i - b_i log y_i), dom f = {y > 0}, b >= 0.
struct PoissonLoss {
  Vector b;
};

/// f(y) = ||y - b||_1
struct L1ResidualLoss {
  Vector b;
};

/// f(y) = ||y - b||_2^(1+nu) / (1+nu), nu in (0, 1]. The gradient is
/// nu-Hoelder continuous.
struct HolderPowerLoss {
  Vector b;
  double nu;
};

class SmoothOracle {
 public:
  using Variant =
      std::variant<QuadraticLoss, LeastSquaresLoss, PoissonLoss, L1ResidualLoss, HolderPowerLoss>;

  static SmoothOracle quadratic(DenseMatrix Q, Vector q);
  static SmoothOracle least_squares(Vector b);
  static SmoothOracle poisson(Vector b);
  static SmoothOracle l1_residual(Vector b);
  static SmoothOracle holder_power(Vector b, double nu);

  std::string name() const;
  std::size_t dimension() const;
  bool differentiable() const;
  bool in_domain(const Vector& y) const;

  /// Throws DomainError outside dom f.
  double value(const Vector& y) const;
  /// An element of the subdifferential at y (the gradient when differentiable).
  Vector subgradient(const Vector& y) const;
  /// f*(u), +inf outside dom f*. Throws ConjugateUnavailable when no closed
  /// form is known for this instance.
  double conjugate(const Vector& u) const;

  const Variant& representation() const { return rep_; }

 private:
  explicit SmoothOracle(Variant rep) : rep_(std::move(rep)) {}
  Variant rep_;
};

// ---------------------------------------------------------------------------
// Simple part Psi : E -> R u {+inf}
// ---------------------------------------------------------------------------

struct ZeroPsi {
  std::size_t dim;
};

/// lambda * ||x||_1
struct L1NormPsi {
  std::size_t dim;
  double lambda;
};

/// Indicator of the box {lo <= x <= hi}.
struct BoxPsi {
  Vector lo;
  Vector hi;
};

/// Indicator of the unit simplex {x >= 0, sum x = 1}.
struct SimplexPsi {
  std::size_t dim;
};

/// Indicator of {||x||_1 <= radius}.
struct L1BallPsi {
  std::size_t dim;
  double radius;
};

class SimpleOracle {
 public:
  using Variant = std::variant<ZeroPsi, L1NormPsi, BoxPsi, SimplexPsi, L1BallPsi>;

  static SimpleOracle zero(std::size_t dim);
  static SimpleOracle l1_norm(std::size_t dim, double lambda);
  static SimpleOracle box(Vector lo, Vector hi);
  static SimpleOracle box(std::size_t dim, double lo, double hi);
  static SimpleOracle simplex(std::size_t dim);
  static SimpleOracle l1_ball(std::size_t dim, double radius);

  std::string name() const;
  std::size_t dimension() const;
  bool is_indicator() const;

  /// Psi(x); +inf outside the domain (with kFeasibilityTol slack).
  double value(const Vector& x) const;
  bool contains(const Vector& x) const;
  /// Psi*(v) = sup_x <v, x> - Psi(x); +inf when unbounded.
  double conjugate(const Vector& v) const;
  /// argmin_s <c, s> + Psi(s); lowest-index vertex on ties. Throws
  /// NotAdmissible when the minimum is not attained.
  Vector linmin(const Vector& c) const;
  /// Some element of dPsi(x) for x in dom Psi.
  Vector subgradient(const Vector& x) const;

  const Variant& representation() const { return rep_; }

 private:
  explicit SimpleOracle(Variant rep) : rep_(std::move(rep)) {}
  Variant rep_;
};

// ---------------------------------------------------------------------------
// Reference function h generating D_h
// ---------------------------------------------------------------------------

enum class ReferenceKind {
  SquaredEuclidean,  ///< 1/2 ||x||^2
  Entropy,           ///< sum x_i log x_i, 0 log 0 = 0, on x >= 0
  Burg,              ///< -sum log x_i on x > 0
  Zero,              ///< h == 0, collapses the prox step to linear minimization
};

class ReferenceOracle {
 public:
  explicit ReferenceOracle(ReferenceKind kind = ReferenceKind::SquaredEuclidean) : kind_(kind) {}

  ReferenceKind kind() const { return kind_; }
  bool is_zero() const { return kind_ == ReferenceKind::Zero; }
  std::string name() const;

  /// Domain where the gradient exists (strictly positive for Entropy/Burg).
  bool in_domain(const Vector& x) const;
  double value(const Vector& x) const;
  Vector gradient(const Vector& x) const;

  friend bool operator==(const ReferenceOracle&, const ReferenceOracle&) = default;

 private:
  ReferenceKind kind_;
};

std::optional<ReferenceKind> parse_reference_kind(const std::string& name);

/// D_h(s, z) = h(s) - h(z) - <grad h(z), s - z>. Throws DomainError if z is
/// outside the gradient domain or s outside dom h.
double bregman(const ReferenceOracle& h, const Vector& s, const Vector& z);

/// Conjugate value at a subgradient pair via the Fenchel-Young equality:
/// phi*(g) = <g, point> - phi(point) whenever g is in dphi(point).
double fenchel_conjugate_at_subgradient(double value, const Vector& point, const Vector& g);

// ---------------------------------------------------------------------------
// Problem instance: min_x f(Ax) + Psi(x)
// ---------------------------------------------------------------------------

/// Smoothness / continuity classes an instance can claim.
enum class Condition {
  RelativeSmooth,      ///< D_f(y,x) <= L D_h(y,x)
  RelativeContinuity,  ///< t<g, s-x> + D_h(s,x) >= -M t^2 / 2
  TriangleSmooth,      ///< D_f(segment(s), segment(s_-)) <= L theta^gamma D_h(s, s_-)
  HolderSmooth,        ///< ... <= 2 M theta^(1+nu) D_h(s,s_-)^((1+nu)/2) / (1+nu)
  Curvature,           ///< D(x,s,theta) <= M theta^(1+nu) / (1+nu)
};

std::string condition_name(Condition c);

struct DeclaredConstants {
  std::optional<double> L;
  std::optional<double> M;
  std::optional<double> nu;
  std::optional<double> gamma;
};

struct KnownOptimum {
  double value;
  std::optional<Vector> point;
};

struct ProblemInstance {
  std::string name;
  LinearMap A;
  SmoothOracle f;
  SimpleOracle psi;
  ReferenceOracle h;
  DeclaredConstants constants;
  std::vector<Condition> claims;
  std::optional<KnownOptimum> known_optimum;
  Vector feasible_start;

  std::size_t dimension() const { return A.input_dim(); }

  /// f(Ax) + Psi(x); +inf outside dom Psi.
  double objective(const Vector& x) const;

  /// Dimensions agree and feasible_start lies in dom(Psi) and dom(h).
  /// Throws ConfigError otherwise.
  void validate() const;

  bool claims_condition(Condition c) const;
};

}  // namespace fom
