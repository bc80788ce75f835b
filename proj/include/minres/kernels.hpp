#pragma once

// Dense vector kernels used throughout the library.
//
// Reductions are computed over fixed-size blocks whose partial sums are
// combined in index order, so the result does not depend on the number of
// OpenMP threads (or on whether OpenMP is enabled at all). The plain-loop
// versions in kernels::serial are kept as a reference for tests and for the
// kernel benchmark.

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace minres::kernels {

// Block length of the deterministic reduction. Inputs shorter than one
// block reduce to a plain left-to-right sum.
inline constexpr std::size_t reduction_block = 1024;

// Element count above which elementwise kernels go parallel.
inline constexpr std::size_t parallel_cutoff = 4096;

void check_same_size(std::span<const double> u, std::span<const double> v);

/// Inner product with a fixed, thread-count-independent summation order.
double dot(std::span<const double> u, std::span<const double> v);

/// Euclidean norm, sqrt(dot(v, v)).
double nrm2(std::span<const double> v);

/// y += a * x
void axpy(double a, std::span<const double> x, std::span<double> y);

/// x *= a
void scal(double a, std::span<double> x);

/// out = x - y
void sub(std::span<const double> x, std::span<const double> y, std::span<double> out);

/// y = A x for a symmetric matrix stored as a row-packed upper triangle of
/// dimension d (a[i*d - i*(i-1)/2 + (j-i)] holds A(i,j) for i <= j).
void symv_upper_packed(std::size_t d, std::span<const double> a,
                       std::span<const double> x, std::span<double> y);

namespace serial {

double dot(std::span<const double> u, std::span<const double> v);
double nrm2(std::span<const double> v);
void axpy(double a, std::span<const double> x, std::span<double> y);
void symv_upper_packed(std::size_t d, std::span<const double> a,
                       std::span<const double> x, std::span<double> y);

} // namespace serial

} // namespace minres::kernels
