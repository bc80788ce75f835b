#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>

#include "minres/dense.hpp"
#include "minres/rng.hpp"

namespace minres {

/// Abstract symmetric linear map v -> Av. Values are immutable after
/// construction; the matvec counter is the only mutable state and is
/// updated atomically.
class SymmetricOperator {
 public:
  virtual ~SymmetricOperator() = default;

  std::size_t dim() const { return dim_; }

  void apply(std::span<const double> x, std::span<double> y) const {
    if (x.size() != dim_ || y.size() != dim_) {
      throw std::invalid_argument("SymmetricOperator::apply: dimension mismatch");
    }
    matvecs_.fetch_add(1, std::memory_order_relaxed);
    do_apply(x, y);
  }

  Vector apply(const Vector& x) const {
    Vector y(dim_);
    apply(std::span<const double>(x), std::span<double>(y));
    return y;
  }

  /// Oracle tests need a materialized matrix; matrix-free operators say no.
  virtual bool has_dense() const { return false; }
  virtual DenseMatrix dense() const {
    throw std::logic_error("operator has no dense backing");
  }

  std::uint64_t matvec_count() const { return matvecs_.load(std::memory_order_relaxed); }
  void reset_matvec_count() const { matvecs_.store(0, std::memory_order_relaxed); }

 protected:
  explicit SymmetricOperator(std::size_t dim) : dim_(dim) {
    if (dim == 0) throw std::invalid_argument("operator dimension must be positive");
  }
  // copies start with a fresh matvec counter
  SymmetricOperator(const SymmetricOperator& other) : dim_(other.dim_) {}
  SymmetricOperator& operator=(const SymmetricOperator& other) {
    dim_ = other.dim_;
    matvecs_.store(0, std::memory_order_relaxed);
    return *this;
  }
  virtual void do_apply(std::span<const double> x, std::span<double> y) const = 0;

 private:
  std::size_t dim_;
  mutable std::atomic<std::uint64_t> matvecs_{0};
};

/// Dense symmetric matrix stored as a row-packed upper triangle.
class DenseSymmetric final : public SymmetricOperator {
 public:
  explicit DenseSymmetric(std::size_t d)
      : SymmetricOperator(d), upper_(d * (d + 1) / 2, 0.0) {}

  /// Builds from a general square matrix; off-symmetric parts are averaged.
  static DenseSymmetric from_dense(const DenseMatrix& m);

  double at(std::size_t i, std::size_t j) const {
    return upper_[packed(std::min(i, j), std::max(i, j))];
  }
  void set(std::size_t i, std::size_t j, double v) {
    upper_[packed(std::min(i, j), std::max(i, j))] = v;
  }

  bool has_dense() const override { return true; }
  DenseMatrix dense() const override;

  const std::vector<double>& packed_upper() const { return upper_; }

  double trace() const {
    double t = 0.0;
    for (std::size_t i = 0; i < dim(); ++i) t += at(i, i);
    return t;
  }

 private:
  std::size_t packed(std::size_t i, std::size_t j) const {
    return i * dim() - i * (i - 1) / 2 + (j - i);
  }
  void do_apply(std::span<const double> x, std::span<double> y) const override;

  std::vector<double> upper_;
};

/// Matrix-free operator backed by a callable.
class CallbackOperator final : public SymmetricOperator {
 public:
  using Apply = std::function<void(std::span<const double>, std::span<double>)>;
  CallbackOperator(std::size_t dim, Apply fn)
      : SymmetricOperator(dim), fn_(std::move(fn)) {}

 private:
  void do_apply(std::span<const double> x, std::span<double> y) const override { fn_(x, y); }
  Apply fn_;
};

/// Q diag(eigenvalues) Q^T, symmetrized by averaging with its transpose.
/// Throws if the basis columns are not orthonormal to 1e-10.
DenseSymmetric from_spectrum(std::span<const double> eigenvalues, const DenseMatrix& orthogonal_basis);

/// Symmetric matrix with N(0,1) off-diagonal and N(0,2) diagonal entries.
DenseSymmetric gaussian_orthogonal_ensemble(std::size_t d, CounterRng& rng);

} // namespace minres
