#include "minres/solver.hpp"

#include <cmath>
#include <limits>

#include "minres/io.hpp"
#include "minres/jacobi.hpp"
#include "minres/kernels.hpp"

namespace minres {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

GivensPair make_givens(double gamma1, double beta_next) {
  const double gamma2 = std::hypot(gamma1, beta_next);
  if (gamma2 > 0.0) return {gamma1 / gamma2, beta_next / gamma2, gamma2};
  return {0.0, 1.0, 0.0};
}

bool npc_check(double c_prev, double gamma1, double slack) {
  return c_prev * gamma1 >= -slack;
}

double curvature_estimate(double phi_prev, double c_prev, double gamma1) {
  return -phi_prev * phi_prev * c_prev * gamma1;
}

void IterationTrace::write_csv(std::ostream& os) const {
  os << "iter,lambda_min_T,xTr,m,xnorm,xTb,relres,npc\n";
  for (const TraceRow& row : rows) {
    const double relres = beta1 > 0.0 ? row.phi / beta1 : 0.0;
    os << row.k << ',' << io::format_double(row.lambda_min_t) << ','
       << io::format_double(row.x_dot_r) << ',' << io::format_double(row.model) << ','
       << io::format_double(row.x_norm) << ',' << io::format_double(row.x_dot_b) << ','
       << io::format_double(relres) << ',' << (row.npc ? 1 : 0) << '\n';
  }
}

MinresSolver::MinresSolver(const SymmetricOperator& a, const Vector& b, MinresConfig cfg)
    : a_(a),
      cfg_(cfg),
      lanczos_(a, b,
               LanczosOptions{cfg.reorthogonalize, cfg.diagnostics || cfg.reorthogonalize,
                              cfg.breakdown_factor}),
      maxit_(cfg.maxit > 0 ? cfg.maxit : static_cast<int>(a.dim())),
      beta1_(lanczos_.beta1()),
      b_(b) {
  x_.assign(a.dim(), 0.0);
  r_ = b;
  d_prev_.assign(a.dim(), 0.0);
  d_prev2_.assign(a.dim(), 0.0);

  history_.alpha = {kNaN};
  history_.beta = {kNaN, beta1_};
  history_.gamma1 = {kNaN};
  history_.gamma2 = {kNaN};
  history_.delta1 = {kNaN, 0.0};
  history_.delta2 = {kNaN};
  history_.epsilon = {kNaN, 0.0}; // epsilon_1 multiplies d_{-1} = 0
  history_.c = {-1.0};
  history_.s = {0.0};
  history_.tau = {beta1_};
  history_.phi = {beta1_};

  out_.beta1 = beta1_;
  out_.trace.beta1 = beta1_;
  if (cfg_.diagnostics) {
    out_.iterates.push_back(x_);
    out_.residuals.push_back(r_);
  }
}

double MinresSolver::zero_tol() const {
  return cfg_.zero_snap_factor * std::max(lanczos_.norm_estimate(), 1e-300);
}

void MinresSolver::record_row(bool npc, double curvature) {
  TraceRow row;
  row.k = k_;
  row.phi = history_.phi.back();
  row.curvature = curvature;
  row.npc = npc;
  row.x_dot_b = kernels::dot(x_, b_);
  row.x_dot_r = kernels::dot(x_, r_);
  row.x_norm = kernels::nrm2(x_);
  if (cfg_.diagnostics) {
    Vector ax(a_.dim());
    a_.apply(x_, std::span<double>(ax));
    row.model = 0.5 * kernels::dot(x_, ax) - row.x_dot_b;
    Vector res(a_.dim());
    kernels::sub(b_, ax, res);
    row.residual_direct = kernels::nrm2(res);
    row.lambda_min_t = oracle::smallest_eigenvalue(lanczos_.tridiagonal().matrix(k_));
  } else {
    // <x, Ax> = <x, b> - <x, r>, so m(x) needs no extra matvec
    row.model = -0.5 * (row.x_dot_b + row.x_dot_r);
    row.residual_direct = kNaN;
    row.lambda_min_t = kNaN;
  }
  out_.trace.rows.push_back(row);
}

MinresSolver::Event MinresSolver::step() {
  if (finished_) throw std::logic_error("MinresSolver: stepping a finished solve");
  ++k_;
  const int k = k_;

  const Lanczos::Step ls = lanczos_.step();
  history_.alpha.push_back(ls.alpha);
  history_.beta.push_back(ls.beta_next);

  const double c_prev = history_.c[k - 1];
  const double s_prev = history_.s[k - 1];
  const double delta1_k = history_.delta1[k];
  const double delta2_k = c_prev * delta1_k + s_prev * ls.alpha;
  const double gamma1_k = s_prev * delta1_k - c_prev * ls.alpha;
  history_.delta2.push_back(delta2_k);
  history_.gamma1.push_back(gamma1_k);
  history_.epsilon.push_back(s_prev * ls.beta_next);   // epsilon_{k+1}
  history_.delta1.push_back(-c_prev * ls.beta_next);   // delta1_{k+1}

  const double phi_prev = history_.phi[k - 1];
  const double curvature = curvature_estimate(phi_prev, c_prev, gamma1_k);
  const bool npc =
      npc_check(c_prev, gamma1_k, cfg_.npc_slack) || std::abs(gamma1_k) <= zero_tol();
  if (npc && out_.first_npc_iteration == 0) out_.first_npc_iteration = k;

  if (npc && cfg_.stop_on_npc) {
    // r_ still holds r_{k-1}, the NPC direction; x_{k} is never formed.
    record_row(true, curvature);
    out_.kind = OutcomeKind::NPCDirection;
    out_.reason = StopReason::Npc;
    out_.npc_direction = r_;
    finished_ = true;
    return Event::NpcStop;
  }

  const GivensPair g = make_givens(gamma1_k, ls.beta_next);
  if (g.gamma2 <= zero_tol()) {
    // Degenerate rotation: tau_k = 0, the iterate and residual carry over and
    // x_k is a least-squares solution.
    history_.gamma2.push_back(0.0);
    history_.c.push_back(0.0);
    history_.s.push_back(1.0);
    history_.tau.push_back(0.0);
    history_.phi.push_back(phi_prev);
    if (cfg_.diagnostics) {
      out_.directions.emplace_back(a_.dim(), 0.0); // d_k is never formed
      out_.iterates.push_back(x_);
      out_.residuals.push_back(r_);
    }
    record_row(npc, curvature);
    out_.kind = OutcomeKind::Solution;
    out_.reason = StopReason::DegenerateGamma2;
    out_.grade = k;
    finished_ = true;
    return Event::Solution;
  }

  history_.gamma2.push_back(g.gamma2);
  const double tau_k = g.c * phi_prev;
  const double phi_k = g.s * phi_prev;
  history_.c.push_back(g.c);
  history_.s.push_back(g.s);
  history_.tau.push_back(tau_k);
  history_.phi.push_back(phi_k);
  if (!(phi_k >= 0.0)) {
    throw oracle::NumericalError("minres: residual norm recurrence went negative");
  }

  Vector d = lanczos_.v_stepped();
  kernels::axpy(-delta2_k, d_prev_, d);
  kernels::axpy(-history_.epsilon[k], d_prev2_, d);
  kernels::scal(1.0 / g.gamma2, d);
  kernels::axpy(tau_k, d, x_);
  if (cfg_.diagnostics) {
    out_.directions.push_back(d);
    out_.iterates.push_back(x_);
  }
  d_prev2_ = std::move(d_prev_);
  d_prev_ = std::move(d);

  if (ls.beta_next != 0.0) {
    kernels::scal(g.s * g.s, r_);
    kernels::axpy(-phi_k * g.c, lanczos_.v_next(), r_);
    if (cfg_.diagnostics) out_.residuals.push_back(r_);
  } else {
    std::fill(r_.begin(), r_.end(), 0.0);
    if (cfg_.diagnostics) out_.residuals.push_back(r_);
    record_row(npc, curvature);
    out_.kind = OutcomeKind::Solution;
    out_.reason = StopReason::LuckyBreakdown;
    out_.grade = k;
    finished_ = true;
    return Event::Solution;
  }

  record_row(npc, curvature);

  if (phi_k <= cfg_.rtol * beta1_) {
    out_.kind = OutcomeKind::Solution;
    out_.reason = StopReason::RelativeTolerance;
    finished_ = true;
    return Event::Solution;
  }
  if (k >= maxit_) {
    out_.kind = OutcomeKind::MaxIterations;
    out_.reason = StopReason::MaxIterations;
    finished_ = true;
    return Event::MaxIterations;
  }
  return Event::Continue;
}

SolveOutcome MinresSolver::take_outcome() {
  out_.x = x_;
  out_.residual = r_;
  out_.iterations = static_cast<int>(out_.trace.rows.size());
  out_.history = history_;
  out_.norm_estimate = lanczos_.norm_estimate();
  if (cfg_.diagnostics || cfg_.reorthogonalize) out_.lanczos_basis = lanczos_.basis();
  return std::move(out_);
}

SolveOutcome minres_solve(const SymmetricOperator& a, const Vector& b, MinresConfig cfg) {
  Vector rhs = b;
  Vector shift;
  if (cfg.x0.has_value()) {
    // Solve the shifted system with b' = b - A x0 and add x0 back at the end;
    // trace quantities then refer to the shifted problem.
    shift = *cfg.x0;
    if (shift.size() != a.dim()) throw std::invalid_argument("minres_solve: x0 dimension mismatch");
    Vector ax0(a.dim());
    a.apply(shift, std::span<double>(ax0));
    kernels::sub(b, ax0, rhs);
    cfg.x0.reset();
  }
  MinresSolver solver(a, rhs, cfg);
  while (solver.step() == MinresSolver::Event::Continue) {
  }
  SolveOutcome out = solver.take_outcome();
  if (!shift.empty()) kernels::axpy(1.0, shift, out.x);
  return out;
}

CertifyResult certify_psd(const SymmetricOperator& a, const Vector& b, MinresConfig cfg) {
  cfg.stop_on_npc = true;
  cfg.rtol = 0.0;
  cfg.reorthogonalize = true;
  SolveOutcome out = minres_solve(a, b, cfg);
  CertifyResult res;
  res.iterations = out.iterations;
  switch (out.kind) {
    case OutcomeKind::NPCDirection:
      res.status = CertifyStatus::NpcFound;
      res.direction = out.npc_direction;
      res.curvature = out.trace.rows.back().curvature;
      break;
    case OutcomeKind::Solution:
      res.status = CertifyStatus::CertifiedPsd;
      break;
    case OutcomeKind::MaxIterations:
      res.status = CertifyStatus::Inconclusive;
      break;
  }
  return res;
}

} // namespace minres
