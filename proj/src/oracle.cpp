#include "minres/oracle.hpp"

#include <cmath>
#include <limits>

#include "minres/kernels.hpp"

namespace minres::oracle {

double determinant(DenseMatrix m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("determinant: matrix must be square");
  const std::size_t n = m.rows();
  double det = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t i = col + 1; i < n; ++i) {
      if (std::abs(m(i, col)) > std::abs(m(pivot, col))) pivot = i;
    }
    if (m(pivot, col) == 0.0) return 0.0;
    if (pivot != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m(pivot, j), m(col, j));
      det = -det;
    }
    det *= m(col, col);
    for (std::size_t i = col + 1; i < n; ++i) {
      const double f = m(i, col) / m(col, col);
      if (f == 0.0) continue;
      for (std::size_t j = col; j < n; ++j) m(i, j) -= f * m(col, j);
    }
  }
  return det;
}

Vector solve_full_pivot(DenseMatrix m, Vector rhs) {
  if (m.rows() != m.cols() || rhs.size() != m.rows()) {
    throw std::invalid_argument("solve_full_pivot: dimension mismatch");
  }
  const std::size_t n = m.rows();
  std::vector<std::size_t> col_of(n);
  for (std::size_t j = 0; j < n; ++j) col_of[j] = j;
  const double scale = std::max(m.max_abs(), 1e-300);

  for (std::size_t step = 0; step < n; ++step) {
    std::size_t pi = step, pj = step;
    double best = 0.0;
    for (std::size_t i = step; i < n; ++i) {
      for (std::size_t j = step; j < n; ++j) {
        if (std::abs(m(i, j)) > best) {
          best = std::abs(m(i, j));
          pi = i;
          pj = j;
        }
      }
    }
    if (best <= 1e-14 * scale) {
      throw NumericalError("solve_full_pivot: matrix is numerically singular");
    }
    if (pi != step) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m(pi, j), m(step, j));
      std::swap(rhs[pi], rhs[step]);
    }
    if (pj != step) {
      for (std::size_t i = 0; i < n; ++i) std::swap(m(i, pj), m(i, step));
      std::swap(col_of[pj], col_of[step]);
    }
    for (std::size_t i = step + 1; i < n; ++i) {
      const double f = m(i, step) / m(step, step);
      if (f == 0.0) continue;
      for (std::size_t j = step; j < n; ++j) m(i, j) -= f * m(step, j);
      rhs[i] -= f * rhs[step];
    }
  }
  Vector z(n);
  for (std::size_t ii = n; ii-- > 0;) {
    double s = rhs[ii];
    for (std::size_t j = ii + 1; j < n; ++j) s -= m(ii, j) * z[j];
    z[ii] = s / m(ii, ii);
  }
  Vector y(n);
  for (std::size_t j = 0; j < n; ++j) y[col_of[j]] = z[j];
  return y;
}

Vector krylov_lsq_reference(const DenseMatrix& a, const Vector& b, int k) {
  if (a.rows() != a.cols() || b.size() != a.rows()) {
    throw std::invalid_argument("krylov_lsq_reference: dimension mismatch");
  }
  if (k < 1) throw std::invalid_argument("krylov_lsq_reference: k must be positive");
  const double bnorm = kernels::nrm2(b);
  if (bnorm == 0.0) throw std::invalid_argument("krylov_lsq_reference: zero right-hand side");

  std::vector<Vector> basis;
  Vector u = b;
  kernels::scal(1.0 / bnorm, u);
  basis.push_back(u);
  while (static_cast<int>(basis.size()) < k) {
    Vector w = a.multiply(basis.back());
    const double pre = kernels::nrm2(w);
    for (int pass = 0; pass < 2; ++pass) {
      for (const Vector& q : basis) kernels::axpy(-kernels::dot(q, w), q, w);
    }
    const double post = kernels::nrm2(w);
    if (post <= 1e-10 * std::max(pre, 1e-300)) break; // grade reached
    kernels::scal(1.0 / post, w);
    basis.push_back(std::move(w));
  }

  const std::size_t m = basis.size();
  std::vector<Vector> image(m);
  for (std::size_t j = 0; j < m; ++j) image[j] = a.multiply(basis[j]);

  DenseMatrix gram(m, m);
  Vector rhs(m);
  for (std::size_t i = 0; i < m; ++i) {
    rhs[i] = kernels::dot(image[i], b);
    for (std::size_t j = 0; j < m; ++j) gram(i, j) = kernels::dot(image[i], image[j]);
  }
  const Vector y = solve_full_pivot(gram, rhs);
  Vector x(a.rows(), 0.0);
  for (std::size_t j = 0; j < m; ++j) kernels::axpy(y[j], basis[j], x);
  return x;
}

namespace {

// Iterations with delta2/gamma1 available; this includes a final iteration
// that stopped at the NPC check before the rotation was formed.
int started_iterations(const ScalarHistory& h) {
  return static_cast<int>(h.delta2.size()) - 1;
}

MinorTable empty_table(int kmax) {
  MinorTable t;
  t.p.resize(static_cast<std::size_t>(kmax) + 1);
  t.q.resize(static_cast<std::size_t>(kmax) + 1);
  for (int k = 1; k <= kmax; ++k) {
    t.p[k].assign(k + 1, 0.0);
    t.p[k][0] = 1.0;
    t.q[k].assign(std::max(k, 1), 0.0);
    t.q[k][0] = 1.0;
  }
  return t;
}

} // namespace

MinorTable minors_direct(const ScalarHistory& h) {
  const int kmax = started_iterations(h);
  const int complete = static_cast<int>(h.gamma2.size()) - 1;
  MinorTable t = empty_table(kmax);
  for (int k = 1; k <= kmax; ++k) {
    for (int l = 1; l <= k; ++l) {
      DenseMatrix minor(l, l);
      for (int i = 0; i < l; ++i) {
        const int gi = k - l + 1 + i;
        minor(i, i) = h.alpha[gi];
        if (i + 1 < l) {
          minor(i, i + 1) = h.beta[gi + 1];
          minor(i + 1, i) = h.beta[gi + 1];
        }
      }
      t.p[k][l] = determinant(minor);
    }
    if (k - 1 > complete) continue; // subdiagonal gamma2 not available
    for (int l = 1; l < k; ++l) {
      DenseMatrix minor(l, l);
      for (int i = 0; i < l; ++i) {
        const int gi = k - l + 1 + i;
        minor(i, i) = h.delta2[gi];
        if (i + 1 < l) {
          minor(i + 1, i) = h.gamma2[gi];
          minor(i, i + 1) = h.epsilon[gi + 1];
        }
      }
      t.q[k][l] = determinant(minor);
    }
  }
  return t;
}

MinorTable minors_recurrence(const ScalarHistory& h) {
  const int kmax = started_iterations(h);
  const int complete = static_cast<int>(h.gamma2.size()) - 1;
  MinorTable t = empty_table(kmax);
  for (int k = 1; k <= kmax; ++k) {
    for (int l = 1; l <= k; ++l) {
      const double pm1 = t.p[k][l - 1];
      const double pm2 = (l >= 2) ? t.p[k][l - 2] : 0.0;
      const double beta_sq = (l >= 2) ? h.beta[k - l + 2] * h.beta[k - l + 2] : 0.0;
      t.p[k][l] = h.alpha[k - l + 1] * pm1 - beta_sq * pm2;
    }
    if (k - 1 > complete) continue;
    for (int l = 1; l < k; ++l) {
      const double qm1 = t.q[k][l - 1];
      const double qm2 = (l >= 2) ? t.q[k][l - 2] : 0.0;
      t.q[k][l] =
          h.delta2[k - l + 1] * qm1 - h.gamma2[k - l + 1] * h.epsilon[k - l + 2] * qm2;
    }
  }
  return t;
}

MinorTable minors_closed_form(const ScalarHistory& h, const MinorTable& direct) {
  const int kmax = started_iterations(h);
  const int complete = static_cast<int>(h.gamma2.size()) - 1;
  MinorTable t = empty_table(kmax);
  for (int k = 2; k <= kmax; ++k) {
    if (k - 1 > complete) continue;
    for (int l = 1; l < k; ++l) {
      bool degenerate = false;
      for (int j = 1; j <= l; ++j) {
        if (h.gamma2[k - j] == 0.0) degenerate = true;
      }
      if (degenerate) {
        t.notes.push_back("q(" + std::to_string(k) + "," + std::to_string(l) +
                          ") skipped: zero gamma2 in denominator");
        t.q[k][l] = std::numeric_limits<double>::quiet_NaN();
        continue;
      }
      double gamma_prod = 1.0;
      for (int i = 1; i <= l; ++i) gamma_prod *= h.gamma2[k - i];
      double value = direct.p[k][l] / gamma_prod;
      double partial_prod = 1.0;
      double alternating = 0.0;
      for (int i = 1; i <= l; ++i) {
        partial_prod *= h.gamma2[k - i];
        const double sign = ((l - i + 1) % 2 == 0) ? 1.0 : -1.0;
        alternating += sign * h.gamma1[k - i] * direct.p[k][i - 1] / partial_prod;
      }
      value += h.c[k - l - 1] * alternating;
      double beta_prod = 1.0;
      for (int i = 1; i <= l; ++i) beta_prod *= h.beta[k - i + 1];
      t.q[k][l] = value * beta_prod;
    }
  }
  return t;
}

Vector dk_expansion(const ScalarHistory& h, const MinorTable& minors,
                    const std::vector<Vector>& lanczos_basis, int k) {
  if (k < 1 || k >= static_cast<int>(h.gamma2.size())) {
    throw std::invalid_argument("dk_expansion: k out of range");
  }
  if (static_cast<int>(lanczos_basis.size()) < k) {
    throw std::invalid_argument("dk_expansion: Lanczos basis too short");
  }
  Vector d(lanczos_basis.front().size(), 0.0);
  for (int l = 0; l <= k - 1; ++l) {
    double denom = 1.0;
    for (int idx = k - l; idx <= k; ++idx) denom *= h.gamma2[idx];
    if (denom == 0.0) throw NumericalError("dk_expansion: zero gamma2 in denominator");
    const double sign = (l % 2 == 0) ? 1.0 : -1.0;
    kernels::axpy(sign * minors.q[k][l] / denom, lanczos_basis[k - l - 1], d);
  }
  return d;
}

namespace {

struct SignChecker {
  SignReport report;

  void expect(bool ok, const std::string& name) {
    ++report.checks;
    if (!ok) report.violations.push_back(name);
  }
  void expect_pos(double v, double scale, const std::string& name) {
    expect(v > -1e-12 * std::max(scale, 1.0), name);
  }
  // the alternating pattern: positive at odd indices, negative at even
  void expect_parity(double v, int index, const std::string& name) {
    expect((index % 2 == 1) ? v > 0.0 : v < 0.0, name);
  }
};

std::string tag(const char* lemma, int k, int i = -1, int j = -1) {
  std::string s = std::string(lemma) + " k=" + std::to_string(k);
  if (i >= 0) s += " i=" + std::to_string(i);
  if (j >= 0) s += " j=" + std::to_string(j);
  return s;
}

} // namespace

SignReport sign_suite(const SolveOutcome& out) {
  if (out.iterates.empty() || out.residuals.empty()) {
    throw std::invalid_argument("sign_suite: solve must be run with diagnostics enabled");
  }
  const ScalarHistory& h = out.history;
  const int complete = h.iterations();
  const int pre_npc_limit =
      out.first_npc_iteration == 0 ? complete : out.first_npc_iteration - 1;

  SignChecker chk;
  const Vector& b = out.residuals[0];

  for (int k = 1; k <= std::min(complete, pre_npc_limit); ++k) {
    const bool last_of_grade = h.beta[k + 1] == 0.0; // then k equals the grade of b
    const bool gamma2_ok = h.gamma2[k] != 0.0;

    chk.expect_pos(h.alpha[k], std::abs(h.alpha[k]), tag("alpha>0", k));
    if (k >= 2) chk.expect_pos(h.beta[k], std::abs(h.beta[k]), tag("beta>0", k));
    chk.expect(h.s[k] >= 0.0 && h.s[k] < 1.0, tag("0<=s<1", k));
    chk.expect(std::abs(h.c[k]) > 0.0 && std::abs(h.c[k]) <= 1.0 + 1e-12, tag("0<|c|<=1", k));
    chk.expect_parity(h.c[k], k, tag("sign(c)", k));
    chk.expect_parity(h.gamma1[k], k, tag("sign(gamma1)", k));
    chk.expect_parity(h.tau[k], k, tag("sign(tau)", k));
    chk.expect_pos(h.gamma2[k], std::abs(h.gamma2[k]), tag("gamma2>0", k));
    if (k >= 2) chk.expect_pos(h.delta2[k], std::abs(h.delta2[k]), tag("delta2>0", k));
    if (k >= 3) chk.expect_pos(h.epsilon[k], std::abs(h.epsilon[k]), tag("epsilon>0", k));

    if (out.directions.empty() || !gamma2_ok) continue;
    const Vector& dk = out.directions[k - 1];
    const double dk_norm = kernels::nrm2(dk);
    const double tau = h.tau[k];
    const int jmin = last_of_grade ? 1 : 0; // r_k = 0 at the grade drops the j = 0 cases

    for (int j = jmin; j < k; ++j) {
      const Vector& r = out.residuals[k - j];
      chk.expect_pos(tau * kernels::dot(dk, r), std::abs(tau) * dk_norm * kernels::nrm2(r),
                     tag("tau*d'r>0", k, -1, j));
    }
    for (int j = 0; j < k; ++j) {
      const Vector& x = out.iterates[k - j];
      chk.expect_pos(tau * kernels::dot(dk, x), std::abs(tau) * dk_norm * kernels::nrm2(x),
                     tag("tau*d'x>0", k, -1, j));
    }
    chk.expect_pos(tau * kernels::dot(dk, b), std::abs(tau) * dk_norm * kernels::nrm2(b),
                   tag("tau*d'b>0", k));

    if (!out.lanczos_basis.empty()) {
      for (int i = 0; i < k; ++i) {
        const Vector& v = out.lanczos_basis[k - i - 1];
        const double sign = (i % 2 == 0) ? 1.0 : -1.0;
        for (int j = jmin; j <= i + 1; ++j) {
          const Vector& r = out.residuals[k - j];
          chk.expect_pos(sign * tau * kernels::dot(v, r),
                         std::abs(tau) * kernels::nrm2(r), tag("(-1)^i tau*v'r>0", k, i, j));
        }
      }
    }
  }
  return chk.report;
}

} // namespace minres::oracle
