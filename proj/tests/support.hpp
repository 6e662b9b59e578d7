#pragma once

#include <cmath>
#include <cstdint>

#include "fom/linalg.hpp"
#include "fom/rng.hpp"

namespace fom::test {

inline Vector gaussian(SplitMix64& rng, std::size_t n, double scale = 1.0) {
  Vector v(n);
  for (auto& x : v) x = scale * rng.normal();
  return v;
}

inline Vector uniform(SplitMix64& rng, std::size_t n, double lo, double hi) {
  Vector v(n);
  for (auto& x : v) x = rng.uniform(lo, hi);
  return v;
}

/// Random point in the relative interior of the unit simplex.
inline Vector simplex_point(SplitMix64& rng, std::size_t n) {
  Vector v(n);
  double total = 0.0;
  for (auto& x : v) total += (x = rng.uniform(0.05, 1.0));
  for (auto& x : v) x /= total;
  return v;
}

inline DenseMatrix gaussian_matrix(SplitMix64& rng, std::size_t rows, std::size_t cols) {
  DenseMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = rng.normal();
  return m;
}

/// Central differences of a scalar function along every coordinate.
template <class F>
Vector finite_difference_gradient(F&& f, const Vector& x, double h = 1e-6) {
  Vector g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    Vector xp = x, xm = x;
    const double step = h * std::max(1.0, std::abs(x[i]));
    xp[i] += step;
    xm[i] -= step;
    g[i] = (f(xp) - f(xm)) / (2.0 * step);
  }
  return g;
}

inline double relative_error(const Vector& a, const Vector& b) {
  return norm_inf(a - b) / std::max(1.0, norm_inf(b));
}

}  // namespace fom::test
