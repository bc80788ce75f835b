#include "minres/newton_mr.hpp"

#include <cmath>

#include "minres/io.hpp"
#include "minres/kernels.hpp"
#include "minres/rng.hpp"

namespace minres::newton {

namespace {

constexpr std::size_t kSampleBlock = 256;

double stable_sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

double psi_value(const Vector& w, Regularizer reg) {
  switch (reg) {
    case Regularizer::None:
      return 0.0;
    case Regularizer::L2: {
      double s = 0.0;
      for (double wi : w) s += wi * wi;
      return 0.5 * s;
    }
    case Regularizer::Nonconvex: {
      double s = 0.0;
      for (double wi : w) s += wi * wi / (1.0 + wi * wi);
      return 0.01 * s;
    }
  }
  return 0.0;
}

void psi_gradient(const Vector& w, Regularizer reg, Vector& g) {
  switch (reg) {
    case Regularizer::None:
      break;
    case Regularizer::L2:
      kernels::axpy(1.0, w, g);
      break;
    case Regularizer::Nonconvex:
      for (std::size_t i = 0; i < w.size(); ++i) {
        const double denom = 1.0 + w[i] * w[i];
        g[i] += 0.02 * w[i] / (denom * denom);
      }
      break;
  }
}

void psi_hvp(const Vector& w, const Vector& v, Regularizer reg, Vector& hv) {
  switch (reg) {
    case Regularizer::None:
      break;
    case Regularizer::L2:
      kernels::axpy(1.0, v, hv);
      break;
    case Regularizer::Nonconvex:
      for (std::size_t i = 0; i < w.size(); ++i) {
        const double denom = 1.0 + w[i] * w[i];
        hv[i] += 0.01 * (2.0 - 6.0 * w[i] * w[i]) / (denom * denom * denom) * v[i];
      }
      break;
  }
}

// Deterministic blocked accumulation over the samples: each fixed-size block
// is summed serially and the block results are combined in index order, so
// the value does not depend on the thread count.
template <typename PerSample>
void accumulate_blocks(std::size_t n, std::size_t width, PerSample per_sample,
                       std::span<double> total) {
  const std::int64_t nblocks =
      static_cast<std::int64_t>((n + kSampleBlock - 1) / kSampleBlock);
  std::vector<std::vector<double>> partial(static_cast<std::size_t>(nblocks));
#pragma omp parallel for schedule(static)
  for (std::int64_t ib = 0; ib < nblocks; ++ib) {
    auto& acc = partial[static_cast<std::size_t>(ib)];
    acc.assign(width, 0.0);
    const std::size_t lo = static_cast<std::size_t>(ib) * kSampleBlock;
    const std::size_t hi = std::min(lo + kSampleBlock, n);
    for (std::size_t i = lo; i < hi; ++i) per_sample(i, acc);
  }
  std::fill(total.begin(), total.end(), 0.0);
  for (const auto& acc : partial) {
    for (std::size_t j = 0; j < width; ++j) total[j] += acc[j];
  }
}

} // namespace

void NlsProblem::validate() const {
  if (n() < 1 || d() < 1) throw std::invalid_argument("NlsProblem: empty dataset");
  if (labels.size() != n()) throw std::invalid_argument("NlsProblem: label count mismatch");
  for (int l : labels) {
    if (l != 0 && l != 1) throw std::invalid_argument("NlsProblem: labels must be 0 or 1");
  }
}

double nls_value(const Vector& w, const NlsProblem& prob, OracleCounter* counter) {
  if (w.size() != prob.d()) throw std::invalid_argument("nls_value: dimension mismatch");
  if (counter) ++counter->func;
  double data_term = 0.0;
  accumulate_blocks(
      prob.n(), 1,
      [&](std::size_t i, std::vector<double>& acc) {
        const double margin = kernels::serial::dot(prob.features.row(i), w);
        const double diff = stable_sigmoid(margin) - prob.labels[i];
        acc[0] += diff * diff;
      },
      std::span<double>(&data_term, 1));
  return data_term / static_cast<double>(prob.n()) + psi_value(w, prob.reg);
}

Vector nls_gradient(const Vector& w, const NlsProblem& prob, OracleCounter* counter) {
  if (w.size() != prob.d()) throw std::invalid_argument("nls_gradient: dimension mismatch");
  if (counter) ++counter->grad;
  Vector g(prob.d(), 0.0);
  accumulate_blocks(
      prob.n(), prob.d(),
      [&](std::size_t i, std::vector<double>& acc) {
        const auto row = prob.features.row(i);
        const double s = stable_sigmoid(kernels::serial::dot(row, w));
        const double coeff = 2.0 * (s - prob.labels[i]) * s * (1.0 - s);
        kernels::serial::axpy(coeff, row, acc);
      },
      std::span<double>(g));
  kernels::scal(1.0 / static_cast<double>(prob.n()), g);
  psi_gradient(w, prob.reg, g);
  return g;
}

Vector nls_hvp(const Vector& w, const Vector& v, const NlsProblem& prob,
               OracleCounter* counter) {
  if (w.size() != prob.d() || v.size() != prob.d()) {
    throw std::invalid_argument("nls_hvp: dimension mismatch");
  }
  if (counter) ++counter->hvp;
  Vector hv(prob.d(), 0.0);
  accumulate_blocks(
      prob.n(), prob.d(),
      [&](std::size_t i, std::vector<double>& acc) {
        const auto row = prob.features.row(i);
        const double s = stable_sigmoid(kernels::serial::dot(row, w));
        const double sp = s * (1.0 - s);           // sigmoid'
        const double spp = sp * (1.0 - 2.0 * s);   // sigmoid''
        const double curv = 2.0 * (sp * sp + (s - prob.labels[i]) * spp);
        kernels::serial::axpy(curv * kernels::serial::dot(row, v), row, acc);
      },
      std::span<double>(hv));
  kernels::scal(1.0 / static_cast<double>(prob.n()), hv);
  psi_hvp(w, v, prob.reg, hv);
  return hv;
}

LineSearchResult armijo(const std::function<double(double)>& objective, double f0, double slope,
                        const LineSearchParams& params) {
  if (!(params.rho > 0.0 && params.rho < 1.0) || !(params.shrink > 0.0 && params.shrink < 1.0) ||
      params.max_backtracks < 1) {
    throw std::invalid_argument("armijo: parameters out of range");
  }
  if (!(slope < 0.0)) {
    throw std::invalid_argument("armijo: slope must be negative along a descent direction");
  }
  double eta = 1.0;
  for (int trial = 1; trial <= params.max_backtracks; ++trial) {
    const double value = objective(eta);
    if (value <= f0 + params.rho * eta * slope) return {eta, trial, true};
    eta *= params.shrink;
  }
  return {0.0, params.max_backtracks, false};
}

void OptimizerTrace::write_csv(std::ostream& os) const {
  os << "outer,f,grad_norm,step,inner_iterations,ls_iterations,npc_used,oracle_calls\n";
  for (const OuterRow& row : rows) {
    os << row.iter << ',' << io::format_double(row.f) << ','
       << io::format_double(row.grad_norm) << ',' << io::format_double(row.step) << ','
       << row.inner_iterations << ',' << row.ls_iterations << ',' << (row.npc_used ? 1 : 0)
       << ',' << row.oracle_calls << '\n';
  }
}

NewtonResult newton_mr_run(const NlsProblem& prob, const Vector& w0, Variant variant,
                           const NewtonConfig& cfg) {
  prob.validate();
  if (w0.size() != prob.d()) throw std::invalid_argument("newton_mr_run: w0 dimension mismatch");

  NewtonResult result;
  result.w = w0;
  Vector& w = result.w;
  OracleCounter& calls = result.oracles;
  OptimizerTrace& trace = result.trace;
  trace.termination = "max_outer";

  for (int outer = 1; outer <= cfg.max_outer; ++outer) {
    const double f = nls_value(w, prob, &calls);
    const Vector grad = nls_gradient(w, prob, &calls);
    const double grad_norm = kernels::nrm2(grad);

    if (grad_norm <= cfg.grad_tol) {
      trace.rows.push_back({outer, f, grad_norm, 0.0, 0, 0, false, calls.total()});
      trace.termination = "converged";
      result.converged = true;
      break;
    }

    Vector rhs(prob.d());
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = -grad[i];
    const CallbackOperator hessian(prob.d(), [&](std::span<const double> x, std::span<double> y) {
      const Vector hv = nls_hvp(w, Vector(x.begin(), x.end()), prob, &calls);
      std::copy(hv.begin(), hv.end(), y.begin());
    });

    MinresConfig inner_cfg;
    inner_cfg.rtol = cfg.inner_rtol;
    inner_cfg.maxit = cfg.inner_maxit > 0 ? cfg.inner_maxit : static_cast<int>(prob.d());
    inner_cfg.stop_on_npc = (variant == Variant::Npc);
    const SolveOutcome inner = minres_solve(hessian, rhs, inner_cfg);

    const bool npc_used = (variant == Variant::Npc && inner.kind == OutcomeKind::NPCDirection);
    const Vector& direction = npc_used ? *inner.npc_direction : inner.x;

    LineSearchResult ls;
    bool slope_ok = true;
    if (variant == Variant::Npc) {
      const double slope = kernels::dot(grad, direction);
      if (slope < 0.0) {
        ls = armijo(
            [&](double eta) {
              Vector trial = w;
              kernels::axpy(eta, direction, trial);
              return nls_value(trial, prob, &calls);
            },
            f, slope, cfg.line_search);
      } else {
        slope_ok = false;
      }
    } else {
      // H p = b - r from the inner solve; no extra Hessian product needed
      Vector hp(prob.d());
      kernels::sub(rhs, inner.residual, hp);
      const double slope = 2.0 * kernels::dot(grad, hp);
      if (slope < 0.0) {
        ls = armijo(
            [&](double eta) {
              Vector trial = w;
              kernels::axpy(eta, direction, trial);
              (void)nls_value(trial, prob, &calls);
              const Vector gt = nls_gradient(trial, prob, &calls);
              return kernels::dot(gt, gt);
            },
            grad_norm * grad_norm, slope, cfg.line_search);
      } else {
        slope_ok = false;
      }
    }

    if (!slope_ok || !ls.success) {
      trace.rows.push_back(
          {outer, f, grad_norm, 0.0, inner.iterations, ls.iterations, npc_used, calls.total()});
      trace.termination = "line_search_failure";
      break;
    }

    kernels::axpy(ls.step, direction, w);
    trace.rows.push_back({outer, f, grad_norm, ls.step, inner.iterations, ls.iterations,
                          npc_used, calls.total()});
  }
  return result;
}

NlsProblem make_blobs(std::size_t n, std::size_t d, std::uint64_t seed, Regularizer reg) {
  if (n < 1 || d < 1) throw std::invalid_argument("make_blobs: n and d must be positive");
  CounterRng rng(seed);
  Vector center(d);
  for (std::size_t j = 0; j < d; ++j) center[j] = rng.normal();
  const double norm = kernels::nrm2(center);
  kernels::scal(1.5 / std::max(norm, 1e-12), center);

  NlsProblem prob;
  prob.reg = reg;
  prob.features = DenseMatrix(n, d);
  prob.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int label = static_cast<int>(i % 2);
    prob.labels[i] = label;
    const double side = label == 1 ? 1.0 : -1.0;
    for (std::size_t j = 0; j < d; ++j) {
      prob.features(i, j) = side * center[j] + rng.normal();
    }
  }
  return prob;
}

} // namespace minres::newton
