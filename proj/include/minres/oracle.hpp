#pragma once

#include "minres/jacobi.hpp"
#include "minres/solver.hpp"

namespace minres::oracle {

/// Determinant by LU with partial pivoting.
double determinant(DenseMatrix m);

/// Solve M y = rhs by Gaussian elimination with full pivoting. Throws
/// NumericalError when M is numerically singular.
Vector solve_full_pivot(DenseMatrix m, Vector rhs);

/// Reference solution of min |b - A x| over the Krylov subspace K_k(A, b),
/// built from an explicit Gram-Schmidt basis of {b, Ab, ...} and the dense
/// normal equations. Deliberately shares no code with the iterative solver.
/// Requests beyond the grade of b are truncated at the grade.
Vector krylov_lsq_reference(const DenseMatrix& a, const Vector& b, int k);

/// Trailing-minor tables of T_k (p) and of the top-right block S_k of the
/// triangular factor (q). Entry (k, l) lives at p[k][l] / q[k][l]; l = 0 is
/// the boundary value 1 and the implicit (k, -1) entry is 0. The q table
/// stops at l = k-1.
struct MinorTable {
  std::vector<std::vector<double>> p; // p[k][0..k],   k = 1..K
  std::vector<std::vector<double>> q; // q[k][0..k-1], k = 1..K
  std::vector<std::string> notes;     // skipped entries (degenerate gamma2)
};

/// Both tables by direct dense determinants of the written-out minors.
MinorTable minors_direct(const ScalarHistory& h);

/// q table by the three-term determinant recurrence; p entries are copied
/// from the analogous alpha/beta recurrence.
MinorTable minors_recurrence(const ScalarHistory& h);

/// q table by the closed-form expression in terms of p, the rotation
/// cosines, and the Lanczos scalars. Entries whose denominator contains a
/// zero gamma2 are skipped with a note.
MinorTable minors_closed_form(const ScalarHistory& h, const MinorTable& direct);

/// Closed-form expansion of the direction d_k over the Lanczos basis.
Vector dk_expansion(const ScalarHistory& h, const MinorTable& minors,
                    const std::vector<Vector>& lanczos_basis, int k);

struct SignReport {
  std::vector<std::string> violations;
  long checks = 0;
  bool pass() const { return violations.empty(); }
  const std::string& first() const { return violations.front(); }
};

/// Asserts every sign statement of the appendix lemmas on the pre-NPC
/// prefix of a diagnostic solve: positivity of the Lanczos and rotation
/// scalars, the alternating c/tau/gamma1 pattern, tau_k d_k^T {r, x, b} > 0
/// and the v^T r sign pattern. Failures are report entries, not errors.
SignReport sign_suite(const SolveOutcome& out);

} // namespace minres::oracle
