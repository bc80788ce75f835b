#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "minres/kernels.hpp"
#include "minres/oracle.hpp"
#include "minres/rng.hpp"
#include "minres/verify.hpp"

using namespace minres;

namespace {

DenseSymmetric random_symmetric(std::size_t d, CounterRng& rng) {
  DenseSymmetric m(d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) m.set(i, j, rng.normal());
  return m;
}

Vector random_vector(std::size_t n, CounterRng& rng) {
  Vector v(n);
  for (auto& x : v) x = rng.normal();
  return v;
}

DenseSymmetric spd_matrix(std::size_t d, CounterRng& rng) {
  const DenseSymmetric g = random_symmetric(d, rng);
  const DenseMatrix gd = g.dense();
  DenseMatrix prod = gd.multiply(gd.transposed());
  for (std::size_t i = 0; i < d; ++i) prod(i, i) += 0.5;
  return DenseSymmetric::from_dense(prod);
}

SolveOutcome diagnostic_solve(const DenseSymmetric& a, const Vector& b) {
  MinresConfig cfg;
  cfg.rtol = 0.0;
  cfg.maxit = static_cast<int>(a.dim());
  cfg.stop_on_npc = false;
  cfg.reorthogonalize = true;
  cfg.diagnostics = true;
  return minres_solve(a, b, cfg);
}

} // namespace

TEST_CASE("jacobi orders a permuted diagonal") {
  DenseMatrix m(3, 3);
  m(0, 0) = 3.0;
  m(1, 1) = 1.0;
  m(2, 2) = 2.0;
  const auto eig = oracle::jacobi_eigen(m);
  CHECK(eig.eigenvalues == std::vector<double>{1.0, 2.0, 3.0});
}

TEST_CASE("jacobi on the 2x2 closed form") {
  DenseMatrix m(2, 2);
  m(0, 0) = 2.0;
  m(0, 1) = 1.0;
  m(1, 0) = 1.0;
  m(1, 1) = 2.0;
  const auto eig = oracle::jacobi_eigen(m);
  CHECK(eig.eigenvalues[0] == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(eig.eigenvalues[1] == doctest::Approx(3.0).epsilon(1e-13));
}

TEST_CASE("jacobi eigenvalues satisfy the trace and determinant identities") {
  CounterRng rng(71);
  const DenseSymmetric m = random_symmetric(10, rng);
  const auto eig = oracle::jacobi_eigen(m);

  double eig_sum = 0.0, eig_prod = 1.0;
  for (double l : eig.eigenvalues) {
    eig_sum += l;
    eig_prod *= l;
  }
  CHECK(std::abs(eig_sum - m.trace()) <= 1e-10 * std::max(1.0, std::abs(m.trace())));
  const double det = oracle::determinant(m.dense());
  CHECK(std::abs(eig_prod - det) <= 1e-8 * std::max(1.0, std::abs(det)));

  // residual and orthogonality of the frame
  for (std::size_t i = 0; i < 10; ++i) {
    Vector q = eig.eigenvectors.column(i);
    Vector aq = m.apply(q);
    kernels::axpy(-eig.eigenvalues[i], q, aq);
    CHECK(kernels::nrm2(aq) <= 1e-8 * std::max(1.0, std::abs(eig.eigenvalues[i])));
  }
  CHECK(orthonormality_defect(eig.eigenvectors) <= 1e-9);
}

TEST_CASE("krylov reference on the identity returns b at k = 1") {
  const DenseMatrix a = DenseMatrix::identity(4);
  const Vector b = {1, -2, 3, 0.5};
  const Vector x = oracle::krylov_lsq_reference(a, b, 1);
  for (std::size_t i = 0; i < 4; ++i) CHECK(x[i] == doctest::Approx(b[i]).epsilon(1e-12));
}

TEST_CASE("krylov reference residual is non-increasing in k") {
  CounterRng rng(73);
  const DenseSymmetric a = spd_matrix(7, rng);
  const Vector b = random_vector(7, rng);
  const DenseMatrix ad = a.dense();
  double prev = kernels::nrm2(b);
  for (int k = 1; k <= 7; ++k) {
    const Vector x = oracle::krylov_lsq_reference(ad, b, k);
    Vector r = ad.multiply(x);
    kernels::axpy(-1.0, b, r);
    const double res = kernels::nrm2(r);
    CHECK(res <= prev * (1.0 + 1e-12));
    prev = res;
  }
}

TEST_CASE("krylov reference truncates past the grade") {
  // b is an eigenvector: the grade is 1, so k = 3 must fall back to k = 1
  DenseSymmetric a(3);
  a.set(0, 0, 2.0);
  a.set(1, 1, 5.0);
  a.set(2, 2, 7.0);
  const Vector b = {1, 0, 0};
  const Vector x = oracle::krylov_lsq_reference(a.dense(), b, 3);
  CHECK(x[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(x[1] == 0.0);
  CHECK(x[2] == 0.0);
}

TEST_CASE("minor tables: q(k,1) equals delta2_k and the 2x2 determinant") {
  CounterRng rng(79);
  const DenseSymmetric a = random_symmetric(8, rng);
  const Vector b = random_vector(8, rng);
  const SolveOutcome out = diagnostic_solve(a, b);
  const ScalarHistory& h = out.history;

  const oracle::MinorTable direct = oracle::minors_direct(h);
  const int kmax = static_cast<int>(direct.q.size()) - 1;
  for (int k = 2; k <= kmax; ++k) {
    CHECK(direct.q[k][1] == doctest::Approx(h.delta2[k]).epsilon(1e-12));
    if (k >= 3) {
      const double two_by_two =
          h.delta2[k] * h.delta2[k - 1] - h.gamma2[k - 1] * h.epsilon[k];
      CHECK(direct.q[k][2] ==
            doctest::Approx(two_by_two).epsilon(1e-10).scale(std::abs(two_by_two) + 1.0));
    }
  }
}

TEST_CASE("three-way minor agreement on a random run") {
  CounterRng rng(83);
  const DenseSymmetric a = random_symmetric(9, rng);
  const Vector b = random_vector(9, rng);
  const SolveOutcome out = diagnostic_solve(a, b);
  const ScalarHistory& h = out.history;

  const oracle::MinorTable direct = oracle::minors_direct(h);
  const oracle::MinorTable recur = oracle::minors_recurrence(h);
  const oracle::MinorTable closed = oracle::minors_closed_form(h, direct);

  const int kmax = static_cast<int>(direct.q.size()) - 1;
  for (int k = 1; k <= kmax; ++k) {
    for (int l = 1; l <= k; ++l) {
      CHECK(std::abs(direct.p[k][l] - recur.p[k][l]) <=
            1e-8 * std::max(1e-30, std::abs(direct.p[k][l])));
    }
    for (int l = 1; l < k; ++l) {
      CHECK(std::abs(direct.q[k][l] - recur.q[k][l]) <=
            1e-7 * std::max(1e-30, std::abs(direct.q[k][l])));
      if (!std::isnan(closed.q[k][l])) {
        CHECK(std::abs(direct.q[k][l] - closed.q[k][l]) <=
              1e-7 * std::max(1e-30, std::abs(direct.q[k][l])));
      }
    }
  }
}

TEST_CASE("pre-NPC minors are positive") {
  CounterRng rng(89);
  const DenseSymmetric a = spd_matrix(8, rng);
  const Vector b = random_vector(8, rng);
  const SolveOutcome out = diagnostic_solve(a, b);
  REQUIRE(out.first_npc_iteration == 0);

  const oracle::MinorTable direct = oracle::minors_direct(out.history);
  const int kmax = static_cast<int>(direct.q.size()) - 1;
  for (int k = 1; k <= kmax; ++k) {
    for (int l = 1; l <= k; ++l) CHECK(direct.p[k][l] > 0.0);
    for (int l = 1; l < k; ++l) CHECK(direct.q[k][l] > 0.0);
  }
}

TEST_CASE("d_k expansion: single-term case and the k = 2 recurrence") {
  DenseSymmetric a(2);
  a.set(0, 0, 1.0);
  a.set(1, 1, 2.0);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  const SolveOutcome out = diagnostic_solve(a, Vector{inv_sqrt2, inv_sqrt2});
  const ScalarHistory& h = out.history;
  const oracle::MinorTable direct = oracle::minors_direct(h);

  // k = 1: d_1 = v_1 / gamma2_1
  const Vector d1 = oracle::dk_expansion(h, direct, out.lanczos_basis, 1);
  for (int i = 0; i < 2; ++i) {
    CHECK(d1[i] == doctest::Approx(out.lanczos_basis[0][i] / h.gamma2[1]).epsilon(1e-14));
    CHECK(d1[i] == doctest::Approx(out.directions[0][i]).epsilon(1e-14));
  }

  // k = 2 matches the two-term recurrence d_2 = (v_2 - delta2_2 d_1)/gamma2_2
  const Vector d2 = oracle::dk_expansion(h, direct, out.lanczos_basis, 2);
  for (int i = 0; i < 2; ++i) {
    const double rec = (out.lanczos_basis[1][i] - h.delta2[2] * out.directions[0][i]) / h.gamma2[2];
    CHECK(d2[i] == doctest::Approx(rec).epsilon(1e-13));
    CHECK(d2[i] == doctest::Approx(out.directions[1][i]).epsilon(1e-13));
  }
}

TEST_CASE("d_k expansion matches the recurrence on a random run") {
  CounterRng rng(97);
  const DenseSymmetric a = random_symmetric(10, rng);
  const Vector b = random_vector(10, rng);
  const SolveOutcome out = diagnostic_solve(a, b);
  const oracle::MinorTable direct = oracle::minors_direct(out.history);

  for (int k = 1; k < static_cast<int>(out.directions.size()); ++k) {
    if (out.history.gamma2[k] == 0.0) continue;
    const Vector expansion = oracle::dk_expansion(out.history, direct, out.lanczos_basis, k);
    Vector diff = expansion;
    kernels::axpy(-1.0, out.directions[k - 1], diff);
    CHECK(kernels::nrm2(diff) <= 1e-8 * std::max(1e-30, kernels::nrm2(out.directions[k - 1])));
  }
}

TEST_CASE("sign suite on the identity run") {
  DenseSymmetric a(3);
  for (int i = 0; i < 3; ++i) a.set(i, i, 1.0);
  const Vector b = {1, 2, 2};
  const SolveOutcome out = diagnostic_solve(a, b);
  const oracle::SignReport report = oracle::sign_suite(out);
  CHECK(report.pass());
  CHECK(report.checks > 0);
  // tau_1 d_1' b = |b|^2 > 0 shows up with alpha_1 = 1 > 0
  CHECK(out.history.alpha[1] == doctest::Approx(1.0));
  CHECK(out.history.tau[1] * kernels::dot(out.directions[0], b) > 0.0);
}

TEST_CASE("sign suite passes on a sweep of positive definite runs") {
  CounterRng rng(101);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t d = 4 + static_cast<std::size_t>(rng.next_u64() % 7);
    const DenseSymmetric a = spd_matrix(d, rng);
    const Vector b = random_vector(d, rng);
    const SolveOutcome out = diagnostic_solve(a, b);
    const oracle::SignReport report = oracle::sign_suite(out);
    if (!report.pass()) {
      CAPTURE(trial);
      CAPTURE(report.first());
    }
    CHECK(report.pass());
  }
}

TEST_CASE("a corrupted rotation sign trips the suite") {
  CounterRng rng(103);
  const DenseSymmetric a = spd_matrix(7, rng);
  const Vector b = random_vector(7, rng);
  SolveOutcome out = diagnostic_solve(a, b);
  REQUIRE(out.history.iterations() >= 3);
  out.history.c[2] = -out.history.c[2]; // simulated sign fault in the rotation
  const oracle::SignReport report = oracle::sign_suite(out);
  CHECK_FALSE(report.pass());
  CHECK(report.first().find("k=2") != std::string::npos);
}

TEST_CASE("full verification passes on random instances") {
  CounterRng rng(107);
  for (int trial = 0; trial < 5; ++trial) {
    const std::size_t d = 4 + static_cast<std::size_t>(rng.next_u64() % 9);
    const DenseSymmetric a = random_symmetric(d, rng);
    const Vector b = random_vector(d, rng);
    const oracle::InstanceReport report = oracle::verify_instance(a, b);
    if (!report.pass()) {
      for (const auto& v : report.all_violations()) MESSAGE(v);
    }
    CHECK(report.pass());
  }
}

TEST_CASE("solve_full_pivot inverts a random system") {
  CounterRng rng(109);
  const DenseSymmetric a = spd_matrix(9, rng);
  const Vector x_true = random_vector(9, rng);
  const Vector b = a.apply(x_true);
  const Vector x = oracle::solve_full_pivot(a.dense(), b);
  for (std::size_t i = 0; i < 9; ++i) {
    CHECK(x[i] == doctest::Approx(x_true[i]).epsilon(1e-9));
  }
  DenseMatrix singular(2, 2);
  singular(0, 0) = 1.0;
  CHECK_THROWS_AS(oracle::solve_full_pivot(singular, Vector{1, 1}), oracle::NumericalError);
}
