#pragma once

#include "minres/operator.hpp"

namespace minres::oracle {

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EigenDecomposition {
  std::vector<double> eigenvalues; // ascending
  DenseMatrix eigenvectors;        // columns match the eigenvalues
};

/// Classical cyclic Jacobi rotations; sweeps until the off-diagonal
/// Frobenius mass falls below 1e-12 of the matrix's Frobenius norm.
/// Throws NumericalError after max_sweeps sweeps without convergence.
EigenDecomposition jacobi_eigen(const DenseMatrix& m, int max_sweeps = 100);
EigenDecomposition jacobi_eigen(const DenseSymmetric& m, int max_sweeps = 100);

/// Smallest eigenvalue, a convenience over jacobi_eigen.
double smallest_eigenvalue(const DenseMatrix& m);

} // namespace minres::oracle
