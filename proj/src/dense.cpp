#include "minres/dense.hpp"

#include <cmath>

#include "minres/kernels.hpp"

namespace minres {

Vector DenseMatrix::multiply(std::span<const double> x) const {
  if (x.size() != cols_) throw std::invalid_argument("DenseMatrix::multiply: dimension mismatch");
  Vector y(rows_);
  for (std::size_t i = 0; i < rows_; ++i) y[i] = kernels::dot(row(i), x);
  return y;
}

DenseMatrix DenseMatrix::multiply(const DenseMatrix& other) const {
  if (cols_ != other.rows()) throw std::invalid_argument("DenseMatrix::multiply: dimension mismatch");
  DenseMatrix out(rows_, other.cols());
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t k = 0; k < cols_; ++k) {
      const double aik = (*this)(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < other.cols(); ++j) out(i, j) += aik * other(k, j);
    }
  }
  return out;
}

double DenseMatrix::max_abs() const {
  double m = 0.0;
  for (double v : a_) m = std::max(m, std::abs(v));
  return m;
}

double DenseMatrix::frobenius() const {
  double s = 0.0;
  for (double v : a_) s += v * v;
  return std::sqrt(s);
}

double orthonormality_defect(const DenseMatrix& q) {
  const std::size_t n = q.cols();
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vector qi = q.column(i);
    for (std::size_t j = i; j < n; ++j) {
      const double g = kernels::dot(qi, q.column(j));
      const double target = (i == j) ? 1.0 : 0.0;
      worst = std::max(worst, std::abs(g - target));
    }
  }
  return worst;
}

} // namespace minres
