#include "minres/lanczos.hpp"

#include <cmath>

#include "minres/kernels.hpp"

namespace minres {

DenseMatrix Tridiagonal::matrix(std::size_t k) const {
  if (k == 0) k = alphas.size();
  if (k > alphas.size()) throw std::invalid_argument("Tridiagonal::matrix: k beyond history");
  DenseMatrix t(k, k);
  for (std::size_t i = 0; i < k; ++i) {
    t(i, i) = alphas[i];
    if (i + 1 < k) {
      t(i, i + 1) = betas[i];
      t(i + 1, i) = betas[i];
    }
  }
  return t;
}

Lanczos::Lanczos(const SymmetricOperator& a, const Vector& b, LanczosOptions opt)
    : a_(a), opt_(opt) {
  if (b.size() != a.dim()) throw std::invalid_argument("Lanczos: rhs dimension mismatch");
  beta1_ = kernels::nrm2(b);
  if (beta1_ == 0.0) {
    throw std::invalid_argument("Lanczos: zero right-hand side (x = 0 is already optimal)");
  }
  v_curr_ = b;
  kernels::scal(1.0 / beta1_, v_curr_);
  v_prev_.assign(a.dim(), 0.0);
  p_.assign(a.dim(), 0.0);
  if (opt_.reorthogonalize) opt_.keep_basis = true;
  if (opt_.keep_basis) basis_.push_back(v_curr_);
}

Lanczos::Step Lanczos::step() {
  if (done_) throw std::logic_error("Lanczos: stepping past breakdown");
  a_.apply(v_curr_, std::span<double>(p_));
  const double alpha = kernels::dot(v_curr_, p_);
  kernels::axpy(-beta_curr_, v_prev_, p_);
  kernels::axpy(-alpha, v_curr_, p_);
  if (opt_.reorthogonalize) {
    for (int pass = 0; pass < 2; ++pass) {
      for (const Vector& vi : basis_) {
        kernels::axpy(-kernels::dot(vi, p_), vi, p_);
      }
    }
  }
  double beta_next = kernels::nrm2(p_);

  norm_est_ = std::max(norm_est_, std::abs(alpha) + beta_curr_ + beta_next);
  const double tol = opt_.breakdown_factor * norm_est_ * std::max(1.0, beta1_);
  const bool breakdown = beta_next <= tol;
  if (breakdown) beta_next = 0.0;

  ++k_;
  alphas_.push_back(alpha);
  betas_.push_back(beta_next);

  if (breakdown) {
    done_ = true;
  } else {
    kernels::scal(1.0 / beta_next, p_);
    std::swap(v_prev_, v_curr_);
    std::swap(v_curr_, p_);
    if (opt_.keep_basis) basis_.push_back(v_curr_);
    beta_curr_ = beta_next;
  }
  return {alpha, beta_next, breakdown};
}

} // namespace minres
