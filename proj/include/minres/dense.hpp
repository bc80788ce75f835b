#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace minres {

/// A vector is a plain sequence of float64 entries; all arithmetic goes
/// through the kernels and requires equal lengths.
using Vector = std::vector<double>;

/// Row-major dense matrix. Used for orthogonal frames, oracle computations
/// and as the materialized form of symmetric operators.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), a_(rows * cols, 0.0) {}

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  std::span<const double> row(std::size_t i) const {
    return {a_.data() + i * cols_, cols_};
  }
  std::span<double> row(std::size_t i) { return {a_.data() + i * cols_, cols_}; }

  const std::vector<double>& data() const { return a_; }

  Vector column(std::size_t j) const {
    Vector c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
  }

  void set_column(std::size_t j, std::span<const double> c) {
    if (c.size() != rows_) throw std::invalid_argument("set_column: length mismatch");
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = c[i];
  }

  DenseMatrix transposed() const {
    DenseMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  Vector multiply(std::span<const double> x) const;
  DenseMatrix multiply(const DenseMatrix& other) const;

  double max_abs() const;
  double frobenius() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> a_;
};

/// max |Q^T Q - I| over all entries; 0 for an exactly orthonormal frame.
double orthonormality_defect(const DenseMatrix& q);

} // namespace minres
