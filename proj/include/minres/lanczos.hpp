#pragma once

#include "minres/operator.hpp"

namespace minres {

struct LanczosOptions {
  bool reorthogonalize = false; // re-project the new vector against the whole stored basis
  bool keep_basis = false;      // retain v_1, v_2, ... (implied by reorthogonalize)
  double breakdown_factor = 1e-12; // beta_{k+1} <= factor * |A|_est * max(1, beta_1) snaps to 0
};

/// Symmetric tridiagonal projection T_k; alphas holds alpha_1..alpha_k and
/// betas holds beta_2..beta_{k+1}, so the extended matrix is T_k stacked on
/// beta_{k+1} e_k^T.
struct Tridiagonal {
  std::vector<double> alphas;
  std::vector<double> betas;

  std::size_t size() const { return alphas.size(); }
  double beta_last() const { return betas.back(); } // beta_{k+1}

  /// Materializes the leading k-by-k block (defaults to the full T).
  DenseMatrix matrix(std::size_t k = 0) const;
};

/// Three-term Lanczos recursion generating v_k, alpha_k, beta_{k+1} one
/// matrix-vector product per step. A step with beta_{k+1} = 0 is the lucky
/// breakdown at the grade of b.
class Lanczos {
 public:
  Lanczos(const SymmetricOperator& a, const Vector& b, LanczosOptions opt = {});

  struct Step {
    double alpha;
    double beta_next; // exactly 0 on lucky breakdown
    bool breakdown;
  };

  /// Runs iteration k over the listed sequence: p = A v_k, alpha from
  /// <v_k, p>, then the beta and alpha subtractions, optional
  /// reorthogonalization, and normalization.
  Step step();

  int completed() const { return k_; }
  bool broke_down() const { return done_; }
  double beta1() const { return beta1_; }

  /// Running estimate of |A| from the entries of the extended tridiagonal.
  double norm_estimate() const { return norm_est_; }

  /// The vector v_k of the most recent step.
  const Vector& v_stepped() const { return done_ ? v_curr_ : v_prev_; }
  /// v_{k+1}, valid only when the last step did not break down.
  const Vector& v_next() const { return v_curr_; }

  /// Stored basis v_1..v_m (requires keep_basis or reorthogonalize).
  const std::vector<Vector>& basis() const { return basis_; }

  Tridiagonal tridiagonal() const { return {alphas_, betas_}; }

 private:
  const SymmetricOperator& a_;
  LanczosOptions opt_;
  double beta1_ = 0.0;
  double beta_curr_ = 0.0; // beta_k entering the next step
  double norm_est_ = 0.0;
  int k_ = 0;
  bool done_ = false;
  Vector v_prev_, v_curr_, p_;
  std::vector<Vector> basis_;
  std::vector<double> alphas_, betas_;
};

} // namespace minres
