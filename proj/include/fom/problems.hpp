#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fom/methods.hpp"
#include "fom/oracles.hpp"

namespace fom {

/// Parameters of a registry instance. Unset fields take per-instance defaults.
struct InstanceSpec {
  std::string name;
  std::uint64_t seed = 1;
  std::optional<std::size_t> n;  ///< dimension of x
  std::optional<std::size_t> m;  ///< rows of the data matrix
  std::optional<ReferenceKind> reference;
  std::optional<double> lambda;     ///< lasso weight
  std::optional<double> nu;         ///< holder exponent
  std::optional<double> radius;     ///< cg-ball radius
  std::optional<double> condition;  ///< lasso: ratio of largest to smallest eigenvalue of B^T B
  /// Explicit data replacing the random draw: Q for quadratics, B otherwise.
  std::optional<DenseMatrix> matrix;
  /// Explicit data: q for simplex-quadratic, b for lasso, center c for cg-ball.
  std::optional<Vector> vector;
  /// Declared constants that replace the constructed ones.
  DeclaredConstants overrides;
};

std::vector<std::string> registry_names();

/// Throws ConfigError for an unknown name or invalid parameters.
ProblemInstance make_instance(const InstanceSpec& spec);

/// Multiplies the declared L and M by factor.
void scale_constants(ProblemInstance& instance, double factor);

struct ConditionReport {
  Condition condition;
  double max_ratio = 0.0;
  std::size_t samples = 0;
  bool passed = false;
};

struct VerifyReport {
  std::string instance;
  std::vector<ConditionReport> conditions;
  bool passed() const;
};

inline constexpr double kVerifyTolerance = 1e-9;

/// Samples the claimed conditions at random admissible points and reports
/// the largest ratio of left to right side; a condition passes iff the ratio
/// stays below 1 + 1e-9. Throws ConfigError if a needed constant is missing.
VerifyReport verify_constants(const ProblemInstance& instance, std::size_t samples, std::uint64_t seed);

struct ReferenceOptimum {
  double value = 0.0;
  Vector point;
  double primal = 0.0;
  double dual = 0.0;
};

/// The known optimum if the instance has one, otherwise the final iterate of
/// a budget-long run of the best matching method, bracketed by its certificate.
ReferenceOptimum reference_optimum(const ProblemInstance& instance, std::size_t budget);

}  // namespace fom
