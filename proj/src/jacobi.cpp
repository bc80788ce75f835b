#include "minres/jacobi.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace minres::oracle {

namespace {

double offdiag_frobenius(const DenseMatrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

} // namespace

EigenDecomposition jacobi_eigen(const DenseMatrix& m, int max_sweeps) {
  if (m.rows() != m.cols()) throw std::invalid_argument("jacobi_eigen: matrix must be square");
  const std::size_t n = m.rows();
  DenseMatrix a = m;
  DenseMatrix q = DenseMatrix::identity(n);
  const double target = 1e-12 * std::max(m.frobenius(), 1e-300);

  int sweep = 0;
  while (offdiag_frobenius(a) > target) {
    if (++sweep > max_sweeps) {
      throw NumericalError("jacobi_eigen: no convergence after " + std::to_string(max_sweeps) +
                           " sweeps");
    }
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t r = p + 1; r < n; ++r) {
        const double apq = a(p, r);
        if (apq == 0.0) continue;
        const double theta = (a(r, r) - a(p, p)) / (2.0 * apq);
        const double t = ((theta >= 0.0) ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, r);
          a(k, p) = c * akp - s * akq;
          a(k, r) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(r, k);
          a(p, k) = c * apk - s * aqk;
          a(r, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double qkp = q(k, p);
          const double qkq = q(k, r);
          q(k, p) = c * qkp - s * qkq;
          q(k, r) = s * qkp + c * qkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });

  EigenDecomposition out;
  out.eigenvalues.resize(n);
  out.eigenvectors = DenseMatrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    out.eigenvalues[j] = a(order[j], order[j]);
    for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, j) = q(i, order[j]);
  }
  return out;
}

EigenDecomposition jacobi_eigen(const DenseSymmetric& m, int max_sweeps) {
  return jacobi_eigen(m.dense(), max_sweeps);
}

double smallest_eigenvalue(const DenseMatrix& m) {
  return jacobi_eigen(m).eigenvalues.front();
}

} // namespace minres::oracle
