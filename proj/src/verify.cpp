#include "minres/verify.hpp"

#include <cmath>

#include "minres/kernels.hpp"

namespace minres::oracle {

long InstanceReport::total_checks() const {
  long n = 0;
  for (const auto& g : groups) n += g.checks;
  return n;
}

long InstanceReport::total_violations() const {
  long n = 0;
  for (const auto& g : groups) n += static_cast<long>(g.violations.size());
  return n;
}

std::vector<std::string> InstanceReport::all_violations() const {
  std::vector<std::string> v;
  for (const auto& g : groups) {
    for (const auto& s : g.violations) v.push_back(g.name + ": " + s);
  }
  return v;
}

namespace {

class Group {
 public:
  explicit Group(std::string name) { data_.name = std::move(name); }
  void expect(bool ok, const std::string& what) {
    ++data_.checks;
    if (!ok) data_.violations.push_back(what);
  }
  void expect_close(double a, double b, double tol, const std::string& what) {
    expect(std::abs(a - b) <= tol, what);
  }
  CheckGroup take() { return std::move(data_); }

 private:
  CheckGroup data_;
};

std::string at_k(const char* what, int k) {
  return std::string(what) + " at k=" + std::to_string(k);
}

} // namespace

InstanceReport verify_outcome(const SymmetricOperator& a, const Vector& b,
                              const SolveOutcome& out, const VerifyLimits& lim) {
  if (out.iterates.empty()) {
    throw std::invalid_argument("verify_outcome: solve must be run with diagnostics enabled");
  }
  const ScalarHistory& h = out.history;
  const int kc = static_cast<int>(out.iterates.size()) - 1; // complete iterations
  const int first_npc = out.first_npc_iteration;
  const int pre_npc = (first_npc == 0) ? kc : first_npc - 1;
  const double beta1 = out.beta1;
  const double anorm = std::max(out.norm_estimate, 1e-300);

  // The theorems' range: k < g, extended to k = g when gamma2_g != 0
  // (which is the b-in-range case).
  auto theorem_range = [&](int k) { return h.beta[k + 1] != 0.0 || h.gamma2[k] != 0.0; };

  InstanceReport report;

  std::vector<Vector> a_x(kc + 1), a_r(kc + 1);
  for (int k = 0; k <= kc; ++k) {
    a_x[k] = a.apply(out.iterates[k]);
    a_r[k] = a.apply(out.residuals[k]);
  }

  {
    Group g("identities");
    const double tol_a = lim.identity_rtol * beta1 * anorm;
    for (int k = 1; k <= kc; ++k) {
      for (int i = 1; i <= k; ++i) {
        g.expect(std::abs(kernels::dot(out.iterates[i], a_r[k])) <= tol_a,
                 "x_i' A r_k != 0 at i=" + std::to_string(i) + " k=" + std::to_string(k));
      }
      for (int i = 1; i <= kc; ++i) {
        if (i == k) continue;
        const double scale =
            anorm * kernels::nrm2(out.residuals[i]) * kernels::nrm2(out.residuals[k]);
        g.expect(std::abs(kernels::dot(out.residuals[i], a_r[k])) <=
                     lim.identity_rtol * std::max(scale, 1e-30),
                 "r_i' A r_k != 0 at i=" + std::to_string(i) + " k=" + std::to_string(k));
      }
      const double explicit_curv = kernels::dot(out.residuals[k - 1], a_r[k - 1]);
      const double est = out.trace.rows[k - 1].curvature;
      const double rn = kernels::nrm2(out.residuals[k - 1]);
      const double tol_c =
          lim.identity_rtol * std::max(std::abs(explicit_curv), 1e-4 * anorm * rn * rn);
      g.expect_close(est, explicit_curv, tol_c, at_k("curvature estimate != r'Ar", k));
      const double rb = kernels::dot(out.residuals[k], b);
      const double rr = kernels::dot(out.residuals[k], out.residuals[k]);
      g.expect_close(rb, rr, lim.identity_rtol * std::max(beta1 * std::sqrt(rr), 1e-30),
                     at_k("r'b != |r|^2", k));
    }
    report.groups.push_back(g.take());
  }

  {
    Group g("residual_identity");
    for (int k = 1; k <= kc; ++k) {
      Vector direct(b.size());
      kernels::sub(b, a_x[k], direct);
      Vector diff(b.size());
      kernels::sub(out.residuals[k], direct, diff);
      g.expect(kernels::nrm2(diff) <= 1e-9 * beta1, at_k("r_k != b - A x_k", k));
      g.expect(std::abs(h.phi[k] - kernels::nrm2(out.residuals[k])) <= 1e-9 * beta1,
               at_k("phi_k != |r_k|", k));
    }
    report.groups.push_back(g.take());
  }

  {
    Group g("certificate_T");
    const double eig_tol = 1e-10 * anorm;
    int first_eig = 0;
    const Tridiagonal tri{std::vector<double>(h.alpha.begin() + 1, h.alpha.end()),
                          std::vector<double>(h.beta.begin() + 2, h.beta.end())};
    const int started = static_cast<int>(h.alpha.size()) - 1;
    for (int k = 1; k <= started; ++k) {
      const double lmin = smallest_eigenvalue(tri.matrix(k));
      if (lmin <= eig_tol && first_eig == 0) first_eig = k;
      if (first_npc == 0 || k < first_npc) {
        g.expect(lmin > eig_tol, at_k("lambda_min(T_k) <= 0 before first NPC", k));
      }
    }
    g.expect(first_eig == first_npc,
             "first NPC iteration " + std::to_string(first_npc) +
                 " != first lambda_min(T_k) <= 0 iteration " + std::to_string(first_eig));
    report.groups.push_back(g.take());
  }

  if (a.has_dense()) {
    Group g("psd_certificate");
    const EigenDecomposition eig = jacobi_eigen(DenseSymmetric::from_dense(a.dense()));
    const double lmin_a = eig.eigenvalues.front();
    int distinct = 1;
    for (std::size_t i = 1; i < eig.eigenvalues.size(); ++i) {
      if (eig.eigenvalues[i] - eig.eigenvalues[i - 1] > 1e-8 * anorm) ++distinct;
    }
    const bool grade_condition = out.grade > 0 && out.grade == distinct;
    if (grade_condition) {
      if (first_npc == 0) {
        g.expect(lmin_a >= -1e-8 * anorm, "no NPC through the grade but A is indefinite");
      }
      if (lmin_a < -1e-8 * anorm) {
        g.expect(first_npc > 0, "A indefinite with full grade but no NPC fired");
      }
    }
    report.groups.push_back(g.take());
  }

  {
    Group g("monotonicity");
    Vector x_star;
    if (a.has_dense()) {
      try {
        x_star = solve_full_pivot(a.dense(), b);
      } catch (const NumericalError&) {
        // singular system: the energy-error statement does not apply
      }
    }
    auto energy_error = [&](int k) {
      Vector e = x_star;
      kernels::axpy(-1.0, out.iterates[k], e);
      return kernels::dot(e, a.apply(e));
    };
    const double slack2 = lim.strict_slack * std::max(1.0, beta1 * beta1);
    for (int k = 1; k <= std::min(kc, pre_npc); ++k) {
      if (!theorem_range(k)) continue;
      const Vector& x = out.iterates[k];
      const Vector& xp = out.iterates[k - 1];
      const Vector& r = out.residuals[k];
      const Vector& rp = out.residuals[k - 1];
      const double xb = kernels::dot(x, b);
      const double xpb = kernels::dot(xp, b);
      const double xax = kernels::dot(x, a_x[k]);
      const double m_k = 0.5 * xax - xb;
      const double m_prev = 0.5 * kernels::dot(xp, a_x[k - 1]) - xpb;
      const double xn = kernels::nrm2(x);
      const double xpn = kernels::nrm2(xp);
      const double slack_m =
          lim.strict_slack * std::max({1.0, std::abs(m_k), std::abs(m_prev)});
      const double slack_n = lim.strict_slack * std::max(1.0, xn);

      g.expect(m_k < m_prev + slack_m, at_k("m(x_k) not decreasing", k));
      g.expect(xn > xpn - slack_n, at_k("|x_k| not increasing", k));
      g.expect(xb > xpb - slack2, at_k("x'b not increasing", k));
      g.expect(xb - xax > -slack2, at_k("x'b - x'Ax not positive", k));

      const double xr = kernels::dot(x, r);
      const double xpr = kernels::dot(xp, r);
      const double xrp = kernels::dot(x, rp);
      g.expect(xr > xpr - slack2, at_k("x_k'r_k <= x_{k-1}'r_k", k));
      g.expect(xpr >= -slack2, at_k("x_{k-1}'r_k negative", k));
      g.expect(xrp > xr - slack2, at_k("x_k'r_{k-1} <= x_k'r_k", k));
      g.expect(xr > -slack2, at_k("x_k'r_k not positive", k));

      if (!x_star.empty()) {
        const double e_k = energy_error(k);
        const double e_prev = energy_error(k - 1);
        g.expect(e_k < e_prev + lim.strict_slack * std::max({1.0, std::abs(e_k), std::abs(e_prev)}),
                 at_k("energy error not decreasing", k));
      }
    }
    for (std::size_t k = 1; k < h.phi.size(); ++k) {
      g.expect(h.phi[k] <= h.phi[k - 1] * (1.0 + 1e-15),
               "phi increased at k=" + std::to_string(k));
    }
    if (out.reason == StopReason::DegenerateGamma2) {
      // the degenerate branch copies the state, so these hold exactly
      g.expect(out.iterates[kc] == out.iterates[kc - 1], "x_g != x_{g-1} on degenerate finish");
      g.expect(h.phi[kc] == h.phi[kc - 1], "phi_g != phi_{g-1} on degenerate finish");
    }
    report.groups.push_back(g.take());
  }

  {
    Group g("determinants");
    const MinorTable direct = minors_direct(h);
    const MinorTable recur = minors_recurrence(h);
    const MinorTable closed = minors_closed_form(h, direct);
    const int kmax = std::min(static_cast<int>(direct.q.size()) - 1, pre_npc);
    for (int k = 1; k <= kmax; ++k) {
      for (int l = 1; l <= k; ++l) {
        const std::string where = " at k=" + std::to_string(k) + " l=" + std::to_string(l);
        g.expect(direct.p[k][l] > 0.0, "p(k,l) <= 0" + where);
        g.expect(std::abs(direct.p[k][l] - recur.p[k][l]) <=
                     lim.minor_rtol * std::abs(direct.p[k][l]),
                 "p direct/recurrence mismatch" + where);
      }
      for (int l = 1; l < k; ++l) {
        const std::string where = " at k=" + std::to_string(k) + " l=" + std::to_string(l);
        g.expect(direct.q[k][l] > 0.0, "q(k,l) <= 0" + where);
        g.expect(std::abs(direct.q[k][l] - recur.q[k][l]) <=
                     lim.minor_rtol * std::abs(direct.q[k][l]),
                 "q direct/recurrence mismatch" + where);
        if (!std::isnan(closed.q[k][l])) {
          g.expect(std::abs(direct.q[k][l] - closed.q[k][l]) <=
                       lim.minor_rtol * std::abs(direct.q[k][l]),
                   "q direct/closed-form mismatch" + where);
        }
      }
    }
    report.groups.push_back(g.take());
  }

  if (!out.directions.empty() && !out.lanczos_basis.empty()) {
    Group g("dk_expansion");
    const MinorTable direct = minors_direct(h);
    for (int k = 1; k <= kc; ++k) {
      bool feasible = true;
      for (int idx = 1; idx <= k; ++idx) {
        if (h.gamma2[idx] == 0.0) feasible = false; // d_g is never formed at the degenerate branch
      }
      if (!feasible) continue;
      const Vector expansion = dk_expansion(h, direct, out.lanczos_basis, k);
      Vector diff = expansion;
      kernels::axpy(-1.0, out.directions[k - 1], diff);
      g.expect(kernels::nrm2(diff) <=
                   lim.reference_rtol * std::max(kernels::nrm2(out.directions[k - 1]), 1e-30),
               at_k("d_k expansion != recurrence", k));
    }
    report.groups.push_back(g.take());
  }

  {
    const SignReport signs = sign_suite(out);
    CheckGroup g;
    g.name = "signs";
    g.checks = signs.checks;
    g.violations = signs.violations;
    report.groups.push_back(std::move(g));
  }

  if (a.has_dense() && static_cast<int>(a.dim()) <= lim.reference_max_dim) {
    Group g("reference_equivalence");
    const DenseMatrix ad = a.dense();
    for (int k = 1; k <= kc; ++k) {
      if (h.gamma2[k] == 0.0) continue; // non-unique least-squares minimizer
      Vector x_ref;
      try {
        x_ref = krylov_lsq_reference(ad, b, k);
      } catch (const NumericalError&) {
        continue;
      }
      Vector diff = x_ref;
      kernels::axpy(-1.0, out.iterates[k], diff);
      g.expect(kernels::nrm2(diff) <=
                   lim.reference_rtol * std::max(kernels::nrm2(out.iterates[k]), 1e-30),
               at_k("MINRES iterate != Krylov least-squares reference", k));
    }
    report.groups.push_back(g.take());
  }

  return report;
}

InstanceReport verify_instance(const DenseSymmetric& a, const Vector& b,
                               const VerifyLimits& lim) {
  MinresConfig cfg;
  cfg.rtol = 0.0;
  cfg.maxit = static_cast<int>(a.dim());
  cfg.stop_on_npc = false;
  cfg.reorthogonalize = true;
  cfg.diagnostics = true;
  const SolveOutcome out = minres_solve(a, b, cfg);
  return verify_outcome(a, b, out, lim);
}

} // namespace minres::oracle
