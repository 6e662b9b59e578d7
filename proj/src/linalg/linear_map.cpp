#include <string>

#include "fom/errors.hpp"
#include "fom/kernels.hpp"
#include "fom/linalg.hpp"

namespace fom {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> row_major)
    : rows_(rows), cols_(cols), data_(std::move(row_major)) {
  if (data_.size() != rows * cols) throw DimensionMismatch("DenseMatrix: data size != rows*cols");
}

DenseMatrix::DenseMatrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw DimensionMismatch("DenseMatrix: ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::transpose() const {
  DenseMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Vector multiply(const DenseMatrix& m, const Vector& x) {
  if (x.size() != m.cols()) {
    throw DimensionMismatch("multiply: matrix has " + std::to_string(m.cols()) +
                            " columns, vector has " + std::to_string(x.size()));
  }
  Vector y(m.rows());
  kernels::active().gemv(m.data(), m.rows(), m.cols(), x.data(), y.data());
  return y;
}

Vector multiply_transposed(const DenseMatrix& m, const Vector& u) {
  if (u.size() != m.rows()) {
    throw DimensionMismatch("multiply_transposed: matrix has " + std::to_string(m.rows()) +
                            " rows, vector has " + std::to_string(u.size()));
  }
  Vector y(m.cols());
  kernels::active().gemv_t(m.data(), m.rows(), m.cols(), u.data(), y.data());
  return y;
}

DenseMatrix gram(const DenseMatrix& m) {
  DenseMatrix g(m.cols(), m.cols());
  const auto& k = kernels::active();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const double* row = m.data() + i * m.cols();
    for (std::size_t j = 0; j < m.cols(); ++j) k.axpy(row[j], row, g.data() + j * m.cols(), m.cols());
  }
  return g;
}

std::size_t LinearMap::input_dim() const {
  if (const auto* id = std::get_if<Identity>(&rep_)) return id->dim;
  return std::get<DenseMatrix>(rep_).cols();
}

std::size_t LinearMap::output_dim() const {
  if (const auto* id = std::get_if<Identity>(&rep_)) return id->dim;
  return std::get<DenseMatrix>(rep_).rows();
}

DenseMatrix LinearMap::matrix() const {
  if (const auto* id = std::get_if<Identity>(&rep_)) return DenseMatrix::identity(id->dim);
  return std::get<DenseMatrix>(rep_);
}

Vector LinearMap::apply(const Vector& x) const {
  if (const auto* id = std::get_if<Identity>(&rep_)) {
    if (x.size() != id->dim) throw DimensionMismatch("LinearMap::apply: identity dimension");
    return x;
  }
  return multiply(std::get<DenseMatrix>(rep_), x);
}

Vector LinearMap::adjoint_apply(const Vector& u) const {
  if (const auto* id = std::get_if<Identity>(&rep_)) {
    if (u.size() != id->dim) throw DimensionMismatch("LinearMap::adjoint_apply: identity dimension");
    return u;
  }
  return multiply_transposed(std::get<DenseMatrix>(rep_), u);
}

}  // namespace fom
