#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace fom {

/// Neumaier's variant of Kahan summation.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }
  void reset() { sum_ = comp_ = 0.0; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Coordinatewise compensated accumulation of vectors of fixed dimension.
class CompensatedVectorSum {
 public:
  CompensatedVectorSum() = default;
  explicit CompensatedVectorSum(std::size_t n) : sum_(n, 0.0), comp_(n, 0.0) {}

  std::size_t size() const { return sum_.size(); }

  void add_scaled(double a, const double* x) {
    for (std::size_t i = 0; i < sum_.size(); ++i) {
      const double xi = a * x[i];
      const double t = sum_[i] + xi;
      if (std::abs(sum_[i]) >= std::abs(xi)) {
        comp_[i] += (sum_[i] - t) + xi;
      } else {
        comp_[i] += (xi - t) + sum_[i];
      }
      sum_[i] = t;
    }
  }

  double value(std::size_t i) const { return sum_[i] + comp_[i]; }

 private:
  std::vector<double> sum_;
  std::vector<double> comp_;
};

}  // namespace fom
