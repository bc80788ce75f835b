#include "minres/kernels.hpp"

#include <cmath>

namespace minres::kernels {

void check_same_size(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) {
    throw std::invalid_argument("vector length mismatch: " + std::to_string(u.size()) +
                                " vs " + std::to_string(v.size()));
  }
}

namespace {

double block_sum_product(const double* u, const double* v, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += u[i] * v[i];
  return s;
}

} // namespace

double dot(std::span<const double> u, std::span<const double> v) {
  check_same_size(u, v);
  const std::size_t n = u.size();
  if (n <= reduction_block) return block_sum_product(u.data(), v.data(), n);

  const std::int64_t nblocks =
      static_cast<std::int64_t>((n + reduction_block - 1) / reduction_block);
  std::vector<double> partial(static_cast<std::size_t>(nblocks));
#pragma omp parallel for schedule(static)
  for (std::int64_t ib = 0; ib < nblocks; ++ib) {
    const std::size_t lo = static_cast<std::size_t>(ib) * reduction_block;
    const std::size_t len = std::min(reduction_block, n - lo);
    partial[static_cast<std::size_t>(ib)] = block_sum_product(u.data() + lo, v.data() + lo, len);
  }
  double s = 0.0;
  for (double p : partial) s += p;
  return s;
}

double nrm2(std::span<const double> v) { return std::sqrt(dot(v, v)); }

void axpy(double a, std::span<const double> x, std::span<double> y) {
  check_same_size(x, y);
  const std::int64_t n = static_cast<std::int64_t>(x.size());
#pragma omp parallel for schedule(static) if (x.size() > parallel_cutoff)
  for (std::int64_t i = 0; i < n; ++i) y[static_cast<std::size_t>(i)] += a * x[static_cast<std::size_t>(i)];
}

void scal(double a, std::span<double> x) {
  const std::int64_t n = static_cast<std::int64_t>(x.size());
#pragma omp parallel for schedule(static) if (x.size() > parallel_cutoff)
  for (std::int64_t i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] *= a;
}

void sub(std::span<const double> x, std::span<const double> y, std::span<double> out) {
  check_same_size(x, y);
  check_same_size(x, out);
  const std::int64_t n = static_cast<std::int64_t>(x.size());
#pragma omp parallel for schedule(static) if (x.size() > parallel_cutoff)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto u = static_cast<std::size_t>(i);
    out[u] = x[u] - y[u];
  }
}

namespace {

inline std::size_t packed_index(std::size_t d, std::size_t i, std::size_t j) {
  // requires i <= j
  return i * d - i * (i - 1) / 2 + (j - i);
}

inline double symv_row(std::size_t d, const double* a, const double* x, std::size_t i) {
  double s = 0.0;
  for (std::size_t j = 0; j < i; ++j) s += a[packed_index(d, j, i)] * x[j];
  const double* row = a + packed_index(d, i, i);
  for (std::size_t j = i; j < d; ++j) s += row[j - i] * x[j];
  return s;
}

} // namespace

void symv_upper_packed(std::size_t d, std::span<const double> a,
                       std::span<const double> x, std::span<double> y) {
  if (a.size() != d * (d + 1) / 2 || x.size() != d || y.size() != d) {
    throw std::invalid_argument("symv_upper_packed: dimension mismatch");
  }
  const std::int64_t n = static_cast<std::int64_t>(d);
#pragma omp parallel for schedule(static) if (d >= 64)
  for (std::int64_t i = 0; i < n; ++i) {
    y[static_cast<std::size_t>(i)] = symv_row(d, a.data(), x.data(), static_cast<std::size_t>(i));
  }
}

namespace serial {

double dot(std::span<const double> u, std::span<const double> v) {
  check_same_size(u, v);
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
  return s;
}

double nrm2(std::span<const double> v) { return std::sqrt(dot(v, v)); }

void axpy(double a, std::span<const double> x, std::span<double> y) {
  check_same_size(x, y);
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

void symv_upper_packed(std::size_t d, std::span<const double> a,
                       std::span<const double> x, std::span<double> y) {
  if (a.size() != d * (d + 1) / 2 || x.size() != d || y.size() != d) {
    throw std::invalid_argument("symv_upper_packed: dimension mismatch");
  }
  for (std::size_t i = 0; i < d; ++i) y[i] = symv_row(d, a.data(), x.data(), i);
}

} // namespace serial

} // namespace minres::kernels
