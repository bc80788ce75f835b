#pragma once

#include <cstdint>
#include <functional>
#include <ostream>

#include "minres/solver.hpp"

namespace minres::newton {

enum class Regularizer { None, L2, Nonconvex };

/// Regularized nonlinear least-squares classification objective
///   f(w) = (1/n) sum_i (sigmoid(<a_i, w>) - b_i)^2 + psi(w)
/// with psi one of 0, 0.5|w|^2, or 0.01 sum w_i^2/(1+w_i^2).
struct NlsProblem {
  DenseMatrix features;     // n x d
  std::vector<int> labels;  // values in {0, 1}
  Regularizer reg = Regularizer::None;

  std::size_t n() const { return features.rows(); }
  std::size_t d() const { return features.cols(); }
  void validate() const;
};

/// Oracle-call bookkeeping: a Hessian-vector product counts as two calls.
struct OracleCounter {
  long func = 0;
  long grad = 0;
  long hvp = 0;
  long total() const { return func + grad + 2 * hvp; }
};

double nls_value(const Vector& w, const NlsProblem& prob, OracleCounter* counter = nullptr);
Vector nls_gradient(const Vector& w, const NlsProblem& prob, OracleCounter* counter = nullptr);
Vector nls_hvp(const Vector& w, const Vector& v, const NlsProblem& prob,
               OracleCounter* counter = nullptr);

struct LineSearchParams {
  double rho = 1e-4;       // sufficient-decrease constant
  double shrink = 0.5;     // backtracking factor
  int max_backtracks = 50; // trial budget
};

struct LineSearchResult {
  double step = 0.0;
  int iterations = 0; // number of trials, i.e. objective evaluations
  bool success = false;
};

/// Backtracking Armijo search: the largest step in {1, shrink, shrink^2, ...}
/// with objective(step) <= f0 + rho * step * slope. The slope must be
/// negative; objective is evaluated once per trial.
LineSearchResult armijo(const std::function<double(double)>& objective, double f0, double slope,
                        const LineSearchParams& params = {});

enum class Variant { Npc, Grad };

struct NewtonConfig {
  double grad_tol = 1e-10;
  double inner_rtol = 0.01;
  int max_outer = 500;
  int inner_maxit = 0; // 0 means the Hessian dimension
  LineSearchParams line_search;
};

struct OuterRow {
  int iter = 0;
  double f = 0.0;
  double grad_norm = 0.0;
  double step = 0.0;
  int inner_iterations = 0;
  int ls_iterations = 0;
  bool npc_used = false;
  long oracle_calls = 0; // cumulative
};

struct OptimizerTrace {
  std::vector<OuterRow> rows;
  std::string termination; // converged | max_outer | line_search_failure
  void write_csv(std::ostream& os) const;
};

struct NewtonResult {
  Vector w;
  OptimizerTrace trace;
  OracleCounter oracles;
  bool converged = false;
};

/// Inexact Newton loop with MINRES inner solves. The npc variant stops the
/// inner solve at the first NPC condition, takes the previous residual as
/// the search direction and backtracks on f; the grad variant runs the inner
/// solve to the residual tolerance and backtracks on |grad f|^2 using the
/// curvature slope <grad, H p>, with H p recovered from the inner solve's
/// final residual at no extra Hessian product.
NewtonResult newton_mr_run(const NlsProblem& prob, const Vector& w0, Variant variant,
                           const NewtonConfig& cfg = {});

/// Two-Gaussian-blob synthetic dataset (balanced labels, unit-separation
/// centers), reproducible from the seed.
NlsProblem make_blobs(std::size_t n, std::size_t d, std::uint64_t seed,
                      Regularizer reg = Regularizer::None);

} // namespace minres::newton
