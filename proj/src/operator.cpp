#include "minres/operator.hpp"

#include <cmath>

#include "minres/kernels.hpp"

namespace minres {

DenseSymmetric DenseSymmetric::from_dense(const DenseMatrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("from_dense: matrix must be square");
  DenseSymmetric s(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = i; j < m.cols(); ++j) {
      s.set(i, j, 0.5 * (m(i, j) + m(j, i)));
    }
  }
  return s;
}

DenseMatrix DenseSymmetric::dense() const {
  DenseMatrix m(dim(), dim());
  for (std::size_t i = 0; i < dim(); ++i) {
    for (std::size_t j = 0; j < dim(); ++j) m(i, j) = at(i, j);
  }
  return m;
}

void DenseSymmetric::do_apply(std::span<const double> x, std::span<double> y) const {
  kernels::symv_upper_packed(dim(), upper_, x, y);
}

DenseSymmetric from_spectrum(std::span<const double> eigenvalues, const DenseMatrix& q) {
  const std::size_t d = eigenvalues.size();
  if (q.rows() != d || q.cols() != d) {
    throw std::invalid_argument("from_spectrum: basis shape does not match spectrum length");
  }
  if (orthonormality_defect(q) > 1e-10) {
    throw std::invalid_argument("from_spectrum: basis columns are not orthonormal to 1e-10");
  }
  DenseMatrix scaled(d, d); // Q diag(lambda)
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) scaled(i, j) = q(i, j) * eigenvalues[j];
  }
  const DenseMatrix full = scaled.multiply(q.transposed());
  return DenseSymmetric::from_dense(full); // from_dense averages with the transpose
}

DenseSymmetric gaussian_orthogonal_ensemble(std::size_t d, CounterRng& rng) {
  DenseSymmetric m(d);
  const double diag_sd = std::sqrt(2.0);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) {
      m.set(i, j, (i == j) ? diag_sd * rng.normal() : rng.normal());
    }
  }
  return m;
}

} // namespace minres
