#pragma once

#include <string>

#include "minres/oracle.hpp"

namespace minres::oracle {

struct CheckGroup {
  std::string name;
  long checks = 0;
  std::vector<std::string> violations;
  bool pass() const { return violations.empty(); }
};

struct VerifyLimits {
  double identity_rtol = 1e-8;     // Lanczos / residual identities
  double minor_rtol = 1e-7;        // three-way minor agreement
  double reference_rtol = 1e-8;    // explicit-Krylov reference equivalence
  double strict_slack = 1e-12;     // strict-inequality margin, scaled per quantity
  int reference_max_dim = 12;      // reference solve is checked up to this dimension
};

struct InstanceReport {
  std::vector<CheckGroup> groups;
  long total_checks() const;
  long total_violations() const;
  bool pass() const { return total_violations() == 0; }
  std::vector<std::string> all_violations() const;
};

/// Runs the solver with diagnostics and reorthogonalization on (A, b) and
/// verifies, against independent oracles, every identity, certificate,
/// determinant, monotonicity and sign statement the solver's theory makes:
///   - the four residual/curvature identities,
///   - first NPC iteration == first iteration with lambda_min(T_k) <= 0,
///   - positive-semidefiniteness consistency of the full-run certificate,
///   - three-way minor agreement and pre-NPC positivity,
///   - pre-NPC monotonicity of m(x), |x|, <x,b>, <x,r>, the energy error
///     (when A x = b is solvable) and the non-increase of phi,
///   - the closed-form expansion of d_k,
///   - the appendix sign suite,
///   - equivalence with the explicit-Krylov least-squares reference.
InstanceReport verify_instance(const DenseSymmetric& a, const Vector& b,
                               const VerifyLimits& limits = {});

/// The same checks evaluated on an existing diagnostic solve (the operator
/// is needed for the identity matvecs). Used for fault-injection tests.
InstanceReport verify_outcome(const SymmetricOperator& a, const Vector& b,
                              const SolveOutcome& out, const VerifyLimits& limits = {});

} // namespace minres::oracle
