#include <cmath>
#include <string>

#include "fom/errors.hpp"
#include "fom/kernels.hpp"
#include "fom/linalg.hpp"

namespace fom {

void require_same_size(const Vector& x, const Vector& y, const char* what) {
  if (x.size() != y.size()) {
    throw DimensionMismatch(std::string(what) + ": dimensions " + std::to_string(x.size()) +
                            " and " + std::to_string(y.size()));
  }
}

void require_finite(const Vector& x, const char* what) {
  for (double v : x) {
    if (!std::isfinite(v)) throw DomainError(std::string(what) + ": non-finite coordinate");
  }
}

Vector& Vector::operator+=(const Vector& other) {
  require_same_size(*this, other, "Vector +=");
  kernels::active().axpy(1.0, other.data(), data(), size());
  return *this;
}

Vector& Vector::operator-=(const Vector& other) {
  require_same_size(*this, other, "Vector -=");
  kernels::active().axpy(-1.0, other.data(), data(), size());
  return *this;
}

Vector& Vector::operator*=(double a) {
  for (double& v : v_) v *= a;
  return *this;
}

Vector operator+(const Vector& x, const Vector& y) { return lincomb(1.0, x, 1.0, y); }
Vector operator-(const Vector& x, const Vector& y) { return lincomb(1.0, x, -1.0, y); }

Vector operator*(double a, const Vector& x) {
  Vector out(x);
  out *= a;
  return out;
}

double dot(const Vector& x, const Vector& y) {
  require_same_size(x, y, "dot");
  return kernels::active().dot(x.data(), y.data(), x.size());
}

double sum(const Vector& x) { return kernels::active().sum(x.data(), x.size()); }

double norm2(const Vector& x) { return std::sqrt(kernels::active().dot(x.data(), x.data(), x.size())); }

double norm1(const Vector& x) {
  double acc = 0.0;
  for (double v : x) acc += std::abs(v);
  return acc;
}

double norm_inf(const Vector& x) { return kernels::active().max_abs(x.data(), x.size()); }

void axpy(double a, const Vector& x, Vector& y) {
  require_same_size(x, y, "axpy");
  kernels::active().axpy(a, x.data(), y.data(), x.size());
}

Vector lincomb(double a, const Vector& x, double b, const Vector& y) {
  require_same_size(x, y, "lincomb");
  Vector out(x.size());
  kernels::active().lincomb(a, x.data(), b, y.data(), out.data(), x.size());
  return out;
}

Vector segment_point(const Vector& x, const Vector& s, double theta) {
  return lincomb(1.0 - theta, x, theta, s);
}

}  // namespace fom
