#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "minres/kernels.hpp"
#include "minres/oracle.hpp"
#include "minres/rng.hpp"
#include "minres/solver.hpp"

using namespace minres;

namespace {

DenseSymmetric random_symmetric(std::size_t d, CounterRng& rng) {
  DenseSymmetric m(d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) m.set(i, j, rng.normal());
  return m;
}

DenseSymmetric scaled_identity(std::size_t d, double value) {
  DenseSymmetric m(d);
  for (std::size_t i = 0; i < d; ++i) m.set(i, i, value);
  return m;
}

Vector random_vector(std::size_t n, CounterRng& rng) {
  Vector v(n);
  for (auto& x : v) x = rng.normal();
  return v;
}

DenseSymmetric spd_matrix(std::size_t d, CounterRng& rng) {
  // Gram matrix plus a diagonal shift keeps the spectrum well separated
  const DenseSymmetric g = random_symmetric(d, rng);
  const DenseMatrix gd = g.dense();
  DenseMatrix prod = gd.multiply(gd.transposed());
  for (std::size_t i = 0; i < d; ++i) prod(i, i) += 0.5;
  return DenseSymmetric::from_dense(prod);
}

} // namespace

TEST_CASE("givens on a 3-4-5 triangle") {
  const GivensPair g = make_givens(3.0, 4.0);
  CHECK(g.c == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(g.s == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(g.gamma2 == doctest::Approx(5.0).epsilon(1e-15));
}

TEST_CASE("givens without rotation and the degenerate pair") {
  const GivensPair id = make_givens(1.0, 0.0);
  CHECK(id.c == 1.0);
  CHECK(id.s == 0.0);
  CHECK(id.gamma2 == 1.0);

  const GivensPair degenerate = make_givens(0.0, 0.0);
  CHECK(degenerate.c == 0.0);
  CHECK(degenerate.s == 1.0);
  CHECK(degenerate.gamma2 == 0.0);
}

TEST_CASE("givens pairs satisfy c^2 + s^2 = 1 away from the degenerate case") {
  CounterRng rng(2);
  for (int t = 0; t < 200; ++t) {
    const double gamma1 = rng.normal();
    const double beta = std::abs(rng.normal());
    const GivensPair g = make_givens(gamma1, beta);
    CHECK(std::abs(g.c * g.c + g.s * g.s - 1.0) <= 1e-12);
    CHECK(g.gamma2 == doctest::Approx(g.c * gamma1 + g.s * beta).epsilon(1e-12));
  }
}

TEST_CASE("npc check signs") {
  CHECK(npc_check(-1.0, 1.0) == false); // A = I: c_0 gamma1_1 = -1 < 0
  CHECK(npc_check(-1.0, -1.0) == true); // A = -I: product is 1 >= 0
  CHECK(npc_check(-1.0, 0.0) == true);  // zero-curvature boundary
  CHECK(npc_check(-1.0, 1e-14, 1e-10) == true); // slack admits tiny positives
}

TEST_CASE("curvature estimate matches <b, Ab> for definite matrices") {
  // A = -I with |b| = 3: gamma1_1 = -c_0 alpha_1 = -1, estimate -|b|^2
  CHECK(curvature_estimate(3.0, -1.0, -1.0) == doctest::Approx(-9.0));
  // A = I: gamma1_1 = 1, estimate +|b|^2
  CHECK(curvature_estimate(3.0, -1.0, 1.0) == doctest::Approx(9.0));
}

TEST_CASE("negative definite matrix yields the NPC direction b at k = 1") {
  const DenseSymmetric a = scaled_identity(4, -1.0);
  const Vector b = {1, 2, 3, 4};
  const SolveOutcome out = minres_solve(a, b);
  CHECK(out.kind == OutcomeKind::NPCDirection);
  CHECK(out.iterations == 1);
  CHECK(out.first_npc_iteration == 1);
  REQUIRE(out.npc_direction.has_value());
  CHECK(*out.npc_direction == b); // r_0 = b
  const Vector av = a.apply(*out.npc_direction);
  CHECK(kernels::dot(*out.npc_direction, av) <= 0.0);
}

TEST_CASE("identity solves in one step") {
  const DenseSymmetric a = scaled_identity(3, 1.0);
  const Vector b = {1, 0, 0};
  const SolveOutcome out = minres_solve(a, b);
  CHECK(out.kind == OutcomeKind::Solution);
  CHECK(out.iterations == 1);
  CHECK(out.x == b);
  CHECK(out.history.phi.back() == 0.0);
}

TEST_CASE("scalar system x = b/2") {
  const DenseSymmetric a = scaled_identity(5, 2.0);
  CounterRng rng(3);
  const Vector b = random_vector(5, rng);
  const SolveOutcome out = minres_solve(a, b);
  CHECK(out.kind == OutcomeKind::Solution);
  CHECK(out.iterations == 1);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(out.x[i] == doctest::Approx(b[i] / 2.0).epsilon(1e-14));
  }
}

TEST_CASE("zero curvature at the start: diag(1,-1) with the balanced rhs") {
  DenseSymmetric a(2);
  a.set(0, 0, 1.0);
  a.set(1, 1, -1.0);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  const Vector b = {inv_sqrt2, inv_sqrt2};
  const SolveOutcome out = minres_solve(a, b);
  // alpha_1 = 0 makes gamma1_1 = 0: NPC fires with zero curvature <b, Ab> = 0
  CHECK(out.kind == OutcomeKind::NPCDirection);
  CHECK(out.first_npc_iteration == 1);
  CHECK(out.trace.rows[0].curvature == doctest::Approx(0.0));
}

TEST_CASE("per-step iterates match the explicit-Krylov reference") {
  CounterRng rng(19);
  const DenseSymmetric a = random_symmetric(6, rng);
  const Vector b = random_vector(6, rng);

  MinresConfig cfg;
  cfg.rtol = 0.0;
  cfg.stop_on_npc = false;
  cfg.reorthogonalize = true;
  cfg.diagnostics = true;
  const SolveOutcome out = minres_solve(a, b, cfg);

  const DenseMatrix ad = a.dense();
  for (int k = 1; k < static_cast<int>(out.iterates.size()); ++k) {
    if (out.history.gamma2[k] == 0.0) continue;
    const Vector ref = oracle::krylov_lsq_reference(ad, b, k);
    Vector diff = ref;
    kernels::axpy(-1.0, out.iterates[k], diff);
    CHECK(kernels::nrm2(diff) <= 1e-9 * std::max(1.0, kernels::nrm2(out.iterates[k])));
  }
}

TEST_CASE("positive definite solve hits the relative tolerance with no NPC flags") {
  CounterRng rng(29);
  const DenseSymmetric a = spd_matrix(10, rng);
  const Vector b = random_vector(10, rng);

  MinresConfig cfg;
  cfg.rtol = 1e-10;
  const SolveOutcome out = minres_solve(a, b, cfg);
  CHECK(out.kind == OutcomeKind::Solution);
  CHECK(out.first_npc_iteration == 0);

  Vector residual = a.apply(out.x);
  kernels::axpy(-1.0, b, residual);
  CHECK(kernels::nrm2(residual) <= 1e-10 * kernels::nrm2(b));

  const Vector direct = oracle::solve_full_pivot(a.dense(), b);
  Vector diff = direct;
  kernels::axpy(-1.0, out.x, diff);
  CHECK(kernels::nrm2(diff) <= 1e-8 * kernels::nrm2(direct));
}

TEST_CASE("phi is non-increasing and matches |r| in diagnostics") {
  CounterRng rng(37);
  const DenseSymmetric a = random_symmetric(9, rng);
  const Vector b = random_vector(9, rng);

  MinresConfig cfg;
  cfg.rtol = 0.0;
  cfg.stop_on_npc = false;
  cfg.reorthogonalize = true;
  cfg.diagnostics = true;
  const SolveOutcome out = minres_solve(a, b, cfg);
  const auto& phi = out.history.phi;
  for (std::size_t k = 1; k < phi.size(); ++k) CHECK(phi[k] <= phi[k - 1] * (1 + 1e-15));
  for (int k = 1; k < static_cast<int>(out.residuals.size()); ++k) {
    CHECK(std::abs(phi[k] - kernels::nrm2(out.residuals[k])) <= 1e-9 * out.beta1);
    CHECK(std::abs(out.trace.rows[k - 1].residual_direct - phi[k]) <= 1e-9 * out.beta1);
  }
}

TEST_CASE("curvature estimate agrees with an explicit extra matvec per iteration") {
  CounterRng rng(41);
  const DenseSymmetric a = random_symmetric(7, rng);
  const Vector b = random_vector(7, rng);

  MinresConfig cfg;
  cfg.rtol = 0.0;
  cfg.stop_on_npc = false;
  cfg.reorthogonalize = true;
  cfg.diagnostics = true;
  const SolveOutcome out = minres_solve(a, b, cfg);
  for (int k = 1; k < static_cast<int>(out.residuals.size()); ++k) {
    const Vector& r_prev = out.residuals[k - 1];
    const double explicit_curv = kernels::dot(r_prev, a.apply(r_prev));
    const double est = out.trace.rows[k - 1].curvature;
    CHECK(std::abs(est - explicit_curv) <=
          1e-8 * std::max(std::abs(explicit_curv), 1e-6 * out.beta1 * out.beta1));
  }
}

TEST_CASE("max iterations is an outcome, not an error") {
  CounterRng rng(43);
  const DenseSymmetric a = spd_matrix(12, rng);
  const Vector b = random_vector(12, rng);
  MinresConfig cfg;
  cfg.maxit = 2;
  cfg.rtol = 1e-16;
  const SolveOutcome out = minres_solve(a, b, cfg);
  CHECK(out.kind == OutcomeKind::MaxIterations);
  CHECK(out.iterations == 2);
}

TEST_CASE("zero right-hand side is an error") {
  const DenseSymmetric a = scaled_identity(3, 1.0);
  CHECK_THROWS_AS(minres_solve(a, Vector{0, 0, 0}), std::invalid_argument);
}

TEST_CASE("nonzero initial guess solves the shifted system") {
  CounterRng rng(47);
  const DenseSymmetric a = spd_matrix(8, rng);
  const Vector b = random_vector(8, rng);
  MinresConfig cfg;
  cfg.rtol = 1e-10;
  cfg.reorthogonalize = true;
  cfg.x0 = random_vector(8, rng);
  const Vector x0_copy = *cfg.x0;
  const SolveOutcome out = minres_solve(a, b, cfg);
  CHECK(out.kind == OutcomeKind::Solution);
  Vector shifted = a.apply(x0_copy);
  kernels::axpy(-1.0, b, shifted); // -(b - A x0)
  const double shifted_norm = kernels::nrm2(shifted);
  Vector residual = a.apply(out.x);
  kernels::axpy(-1.0, b, residual);
  CHECK(kernels::nrm2(residual) <= 1e-9 * std::max(kernels::nrm2(b), shifted_norm));
}

TEST_CASE("stop_on_npc false records the event and keeps going") {
  DenseSymmetric a(3);
  a.set(0, 0, 1.0);
  a.set(1, 1, -2.0);
  a.set(2, 2, 3.0);
  CounterRng rng(53);
  const Vector b = random_vector(3, rng);

  MinresConfig cfg;
  cfg.rtol = 0.0;
  cfg.stop_on_npc = false;
  cfg.reorthogonalize = true;
  const SolveOutcome out = minres_solve(a, b, cfg);
  CHECK(out.kind == OutcomeKind::Solution);
  CHECK(out.first_npc_iteration > 0);
  CHECK(out.first_npc_iteration <= out.iterations);
}

TEST_CASE("certify_psd on the identity finishes in one iteration") {
  const DenseSymmetric a = scaled_identity(4, 1.0);
  const Vector b = {1, 2, -1, 0.5};
  const CertifyResult res = certify_psd(a, b);
  CHECK(res.status == CertifyStatus::CertifiedPsd);
  CHECK(res.iterations == 1);
}

TEST_CASE("certify_psd finds negative curvature in diag(1,-1)") {
  DenseSymmetric a(2);
  a.set(0, 0, 1.0);
  a.set(1, 1, -1.0);
  const Vector b = {0.8, 0.6};
  // lambda_min(T_2) < 0 by the 2x2 eigenvalue formula, so detection happens
  // by the second iteration
  const CertifyResult res = certify_psd(a, b);
  CHECK(res.status == CertifyStatus::NpcFound);
  CHECK(res.iterations <= 2);
  REQUIRE(res.direction.has_value());
  const Vector av = a.apply(*res.direction);
  CHECK(kernels::dot(*res.direction, av) <=
        1e-10 * kernels::dot(*res.direction, *res.direction));
}

TEST_CASE("trace row count equals iterations performed") {
  CounterRng rng(59);
  const DenseSymmetric a = random_symmetric(8, rng);
  const Vector b = random_vector(8, rng);
  MinresConfig cfg;
  cfg.rtol = 0.0;
  cfg.stop_on_npc = false;
  cfg.reorthogonalize = true;
  const SolveOutcome out = minres_solve(a, b, cfg);
  CHECK(static_cast<int>(out.trace.rows.size()) == out.iterations);
}

TEST_CASE("stepwise interface exposes the same sequence as the driver") {
  CounterRng rng(61);
  const DenseSymmetric a = spd_matrix(6, rng);
  const Vector b = random_vector(6, rng);

  MinresConfig cfg;
  cfg.rtol = 1e-10;
  MinresSolver solver(a, b, cfg);
  while (solver.step() == MinresSolver::Event::Continue) {
  }
  const SolveOutcome stepped = solver.take_outcome();
  const SolveOutcome driven = minres_solve(a, b, cfg);
  CHECK(stepped.x == driven.x);
  CHECK(stepped.iterations == driven.iterations);
}
