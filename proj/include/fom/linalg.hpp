#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <variant>
#include <vector>

namespace fom {

/// Dense real vector. Primal and dual elements share this type under the
/// standard dot-product pairing.
class Vector {
 public:
  Vector() = default;
  explicit Vector(std::size_t n, double value = 0.0) : v_(n, value) {}
  Vector(std::initializer_list<double> values) : v_(values) {}
  explicit Vector(std::vector<double> values) : v_(std::move(values)) {}

  std::size_t size() const { return v_.size(); }
  bool empty() const { return v_.empty(); }

  double& operator[](std::size_t i) { return v_[i]; }
  double operator[](std::size_t i) const { return v_[i]; }

  double* data() { return v_.data(); }
  const double* data() const { return v_.data(); }

  std::span<double> span() { return v_; }
  std::span<const double> span() const { return v_; }

  auto begin() { return v_.begin(); }
  auto end() { return v_.end(); }
  auto begin() const { return v_.begin(); }
  auto end() const { return v_.end(); }

  const std::vector<double>& values() const { return v_; }

  Vector& operator+=(const Vector& other);
  Vector& operator-=(const Vector& other);
  Vector& operator*=(double a);

  friend bool operator==(const Vector&, const Vector&) = default;

 private:
  std::vector<double> v_;
};

Vector operator+(const Vector& x, const Vector& y);
Vector operator-(const Vector& x, const Vector& y);
Vector operator*(double a, const Vector& x);

/// Throws DimensionMismatch unless x and y have equal size.
void require_same_size(const Vector& x, const Vector& y, const char* what);

/// Throws DomainError if any coordinate is NaN or infinite.
void require_finite(const Vector& x, const char* what);

double dot(const Vector& x, const Vector& y);
double sum(const Vector& x);
double norm2(const Vector& x);
double norm1(const Vector& x);
double norm_inf(const Vector& x);

/// y += a x
void axpy(double a, const Vector& x, Vector& y);

/// a x + b y
Vector lincomb(double a, const Vector& x, double b, const Vector& y);

/// x + theta (s - x), evaluated as (1 - theta) x + theta s.
Vector segment_point(const Vector& x, const Vector& s, double theta);

/// Row-major dense matrix.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double value = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, value) {}
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> row_major);
  DenseMatrix(std::initializer_list<std::initializer_list<double>> rows);

  static DenseMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  const double* data() const { return data_.data(); }
  double* data() { return data_.data(); }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  DenseMatrix transpose() const;

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// y = M x
Vector multiply(const DenseMatrix& m, const Vector& x);
/// y = M^T u
Vector multiply_transposed(const DenseMatrix& m, const Vector& u);
/// M^T M
DenseMatrix gram(const DenseMatrix& m);

/// Linear map A : E -> F together with its adjoint.
class LinearMap {
 public:
  struct Identity {
    std::size_t dim;
  };

  LinearMap() : rep_(Identity{0}) {}
  static LinearMap identity(std::size_t dim) { return LinearMap(Identity{dim}); }
  static LinearMap dense(DenseMatrix m) { return LinearMap(std::move(m)); }

  std::size_t input_dim() const;
  std::size_t output_dim() const;
  bool is_identity() const { return std::holds_alternative<Identity>(rep_); }
  /// Matrix form; materialized for Identity.
  DenseMatrix matrix() const;

  Vector apply(const Vector& x) const;
  Vector adjoint_apply(const Vector& u) const;

 private:
  explicit LinearMap(Identity id) : rep_(id) {}
  explicit LinearMap(DenseMatrix m) : rep_(std::move(m)) {}

  std::variant<Identity, DenseMatrix> rep_;
};

}  // namespace fom
