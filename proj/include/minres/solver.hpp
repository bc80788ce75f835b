#pragma once

#include <optional>
#include <ostream>

#include "minres/lanczos.hpp"

namespace minres {

/// One plane reflection of the tridiagonal QR. The degenerate input
/// (gamma1, beta) = (0, 0) yields (c, s, gamma2) = (0, 1, 0).
struct GivensPair {
  double c;
  double s;
  double gamma2;
};

GivensPair make_givens(double gamma1, double beta_next);

/// The scalar nonpositive-curvature test c_{k-1} gamma1_k >= -slack.
bool npc_check(double c_prev, double gamma1, double slack = 0.0);

/// -phi_{k-1}^2 c_{k-1} gamma1_k, which equals <r_{k-1}, A r_{k-1}> in exact
/// arithmetic; costs no matrix-vector product.
double curvature_estimate(double phi_prev, double c_prev, double gamma1);

struct MinresConfig {
  double rtol = 1e-10;
  int maxit = 0;                // 0 means the operator dimension
  bool stop_on_npc = true;      // false records NPC events and keeps iterating
  bool reorthogonalize = false;
  bool diagnostics = false;     // store per-iteration vectors, recompute residuals,
                                // and track lambda_min(T_k) with the Jacobi oracle
  double npc_slack = 0.0;
  // |gamma1| and gamma2 at or below zero_snap_factor * |A|_est are treated as
  // exact zeros; mirrors the Lanczos breakdown proxy so the zero-curvature
  // boundary is detectable in floating point.
  double zero_snap_factor = 1e-12;
  double breakdown_factor = 1e-12;
  std::optional<Vector> x0;     // solves the shifted system b - A x0 and adds x0 back
};

enum class OutcomeKind { Solution, NPCDirection, MaxIterations };
enum class StopReason { RelativeTolerance, LuckyBreakdown, DegenerateGamma2, Npc, MaxIterations };

/// Per-iteration scalars, indexed by the iteration subscript so that e.g.
/// c[0] is the c_0 = -1 of the initialization and alpha[k] is alpha_k
/// (alpha[0] is an unused placeholder).
struct ScalarHistory {
  std::vector<double> alpha;   // alpha[1..k]
  std::vector<double> beta;    // beta[1..k+1], beta[1] = |b|
  std::vector<double> gamma1;  // gamma1[1..k]
  std::vector<double> gamma2;  // gamma2[1..k]
  std::vector<double> delta1;  // delta1[1..k+1], delta1[1] = 0
  std::vector<double> delta2;  // delta2[1..k]
  std::vector<double> epsilon; // epsilon[2..k+1]; epsilon[0..1] placeholders
  std::vector<double> c;       // c[0..k], c[0] = -1
  std::vector<double> s;       // s[0..k], s[0] = 0
  std::vector<double> tau;     // tau[0..k], tau[0] = |b|
  std::vector<double> phi;     // phi[0..k], phi[0] = |b|

  int iterations() const { return static_cast<int>(c.size()) - 1; }
};

struct TraceRow {
  int k = 0;
  double phi = 0.0;        // residual norm maintained by the recurrence
  double curvature = 0.0;  // -phi_{k-1}^2 c_{k-1} gamma1_k
  double model = 0.0;      // m(x_k) = <x,Ax>/2 - <b,x>
  double x_norm = 0.0;
  double x_dot_b = 0.0;
  double x_dot_r = 0.0;
  bool npc = false;
  // populated in diagnostics mode only (NaN otherwise)
  double lambda_min_t = 0.0;
  double residual_direct = 0.0; // |b - A x_k| recomputed with a fresh matvec
};

struct IterationTrace {
  std::vector<TraceRow> rows;
  double beta1 = 0.0;
  void write_csv(std::ostream& os) const;
};

struct SolveOutcome {
  OutcomeKind kind = OutcomeKind::Solution;
  StopReason reason = StopReason::RelativeTolerance;
  Vector x;
  std::optional<Vector> npc_direction; // r_{k-1} of the firing iteration
  Vector residual;                     // final maintained r_k
  int iterations = 0;
  int first_npc_iteration = 0;         // 0 when the condition never fired
  double beta1 = 0.0;
  double norm_estimate = 0.0;
  IterationTrace trace;
  ScalarHistory history;

  // diagnostics-mode storage (empty otherwise)
  std::vector<Vector> lanczos_basis; // v_1..v_m
  std::vector<Vector> directions;    // d_1..d_k (absent entries for skipped updates)
  std::vector<Vector> iterates;      // x_0..x_k
  std::vector<Vector> residuals;     // r_0..r_k

  bool npc_detected() const { return first_npc_iteration > 0; }
  /// Iteration count at the lucky breakdown; this equals the grade of b
  /// when the run got that far, 0 otherwise.
  int grade = 0;
  double final_relres() const { return history.phi.back() / beta1; }
};

/// Full solver for min |A x - b| with built-in NPC detection. Runs until an
/// NPC direction is found (when stop_on_npc), the relative residual falls
/// below rtol, the Lanczos process breaks down, or maxit is exhausted.
SolveOutcome minres_solve(const SymmetricOperator& a, const Vector& b, MinresConfig cfg = {});

/// Stepwise interface behind minres_solve; exposed so tests can inspect the
/// per-iteration sequence directly.
class MinresSolver {
 public:
  MinresSolver(const SymmetricOperator& a, const Vector& b, MinresConfig cfg = {});

  enum class Event { Continue, NpcStop, Solution, MaxIterations };

  /// Executes one iteration of the method in its listed order.
  Event step();

  const Vector& x() const { return x_; }
  const Vector& r() const { return r_; }
  int k() const { return k_; }
  const ScalarHistory& history() const { return history_; }

  SolveOutcome take_outcome();

 private:
  void record_row(bool npc, double curvature);
  double zero_tol() const;

  const SymmetricOperator& a_;
  MinresConfig cfg_;
  Lanczos lanczos_;
  int maxit_;
  int k_ = 0;
  double beta1_;
  Vector b_;
  Vector x_, r_, d_prev_, d_prev2_;
  ScalarHistory history_;
  SolveOutcome out_;
  bool finished_ = false;
};

enum class CertifyStatus { CertifiedPsd, NpcFound, Inconclusive };

struct CertifyResult {
  CertifyStatus status = CertifyStatus::Inconclusive;
  std::optional<Vector> direction;
  int iterations = 0;
  double curvature = 0.0; // scalar estimate at the firing iteration
};

/// Runs the solver to breakdown with stop_on_npc and rtol = 0. If no NPC
/// condition fires through the lucky breakdown, A is certified positive
/// semi-definite (with probability one when b is drawn from a
/// rotation-invariant distribution, which is the caller's duty).
/// Reorthogonalization is on by default so the exact-arithmetic breakdown
/// is realized numerically.
CertifyResult certify_psd(const SymmetricOperator& a, const Vector& b, MinresConfig cfg = {});

} // namespace minres
