// Timing comparison of the OpenMP kernels against the serial reference
// implementations: dot products, packed symmetric matvecs, and the
// data-parallel gradient of the classification objective.

#include <chrono>
#include <cstdio>
#include <functional>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "minres/kernels.hpp"
#include "minres/newton_mr.hpp"
#include "minres/rng.hpp"

using namespace minres;

namespace {

double time_ms(const std::function<void()>& fn, int reps) {
  fn(); // warm up
  const auto start = std::chrono::steady_clock::now();
  for (int r = 0; r < reps; ++r) fn();
  const auto stop = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(stop - start).count() / reps;
}

volatile double sink = 0.0;

void bench_dot(std::size_t n, int reps) {
  CounterRng rng(1);
  Vector u(n), v(n);
  for (auto& x : u) x = rng.normal();
  for (auto& x : v) x = rng.normal();
  const double serial = time_ms([&] { sink = kernels::serial::dot(u, v); }, reps);
  const double parallel = time_ms([&] { sink = kernels::dot(u, v); }, reps);
  std::printf("dot       n=%-9zu serial %8.3f ms   parallel %8.3f ms   speedup %.2fx\n", n,
              serial, parallel, serial / parallel);
}

void bench_symv(std::size_t d, int reps) {
  CounterRng rng(2);
  std::vector<double> packed(d * (d + 1) / 2);
  for (auto& a : packed) a = rng.normal();
  Vector x(d), y(d);
  for (auto& e : x) e = rng.normal();
  const double serial =
      time_ms([&] { kernels::serial::symv_upper_packed(d, packed, x, y); }, reps);
  const double parallel = time_ms([&] { kernels::symv_upper_packed(d, packed, x, y); }, reps);
  std::printf("symv      d=%-9zu serial %8.3f ms   parallel %8.3f ms   speedup %.2fx\n", d,
              serial, parallel, serial / parallel);
}

// plain-loop gradient, the reference for the blocked parallel version
Vector gradient_reference(const Vector& w, const newton::NlsProblem& prob) {
  Vector g(prob.d(), 0.0);
  for (std::size_t i = 0; i < prob.n(); ++i) {
    const auto row = prob.features.row(i);
    double t = 0.0;
    for (std::size_t j = 0; j < prob.d(); ++j) t += row[j] * w[j];
    const double s = 1.0 / (1.0 + std::exp(-t));
    const double coeff = 2.0 * (s - prob.labels[i]) * s * (1.0 - s);
    for (std::size_t j = 0; j < prob.d(); ++j) g[j] += coeff * row[j];
  }
  for (auto& gj : g) gj /= static_cast<double>(prob.n());
  return g;
}

void bench_gradient(std::size_t n, std::size_t d, int reps) {
  const newton::NlsProblem prob = newton::make_blobs(n, d, 3);
  CounterRng rng(4);
  Vector w(d);
  for (auto& x : w) x = 0.1 * rng.normal();
  const double serial = time_ms([&] { sink = gradient_reference(w, prob)[0]; }, reps);
  const double parallel = time_ms([&] { sink = newton::nls_gradient(w, prob)[0]; }, reps);
  std::printf("gradient  n=%-6zu d=%-3zu serial %8.3f ms   parallel %8.3f ms   speedup %.2fx\n",
              n, d, serial, parallel, serial / parallel);
}

} // namespace

int main() {
#ifdef _OPENMP
  std::printf("OpenMP enabled, max threads = %d\n", omp_get_max_threads());
#else
  std::printf("OpenMP disabled: the parallel kernels run their serial path\n");
#endif
  bench_dot(1 << 14, 200);
  bench_dot(1 << 20, 50);
  bench_dot(1 << 23, 10);
  bench_symv(64, 500);
  bench_symv(512, 100);
  bench_symv(2048, 10);
  bench_gradient(2000, 50, 100);
  bench_gradient(50000, 100, 10);
  return 0;
}
