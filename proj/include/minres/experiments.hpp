#pragma once

#include <cstdint>
#include <string>

#include "minres/newton_mr.hpp"
#include "minres/verify.hpp"

namespace minres::experiments {

/// The d = 20 spectral construction: three Gaussian-orthogonal-ensemble
/// frames carrying a shared top spectrum of 19 log-spaced eigenvalues in
/// [1, 1e3]; A ends in {0}, B in {-1}, and C replaces the bottom two with
/// {-10, -1}.
struct Fig1Matrices {
  DenseSymmetric a{20};
  DenseSymmetric b{20};
  DenseSymmetric c{20};
};

inline constexpr std::size_t fig1_dim = 20;

/// The 19 log-spaced values 10^(3i/18), i = 0..18.
std::vector<double> fig1_top_spectrum();

Fig1Matrices build_fig1_matrices(std::uint64_t seed);

struct Fig1Summary {
  std::string name;
  int iterations = 0;
  int first_npc = 0;
  double final_relres = 0.0;
  double npc_curvature = 0.0;
  std::string csv_path;
};

/// Full solve of the named instance with diagnostics and npc-continue;
/// writes one CSV row per iteration with the monitored quantities.
Fig1Summary run_fig1_instance(const DenseSymmetric& m, const std::string& name,
                              const std::string& outdir);

/// Runs all three instances against the all-ones right-hand side and writes
/// fig1_{A,B,C}.csv plus fig1_summary.json under outdir.
std::vector<Fig1Summary> run_fig1(const std::string& outdir, std::uint64_t seed);

struct NewtonExperimentConfig {
  std::string dataset_csv;   // label-first CSV; empty means synthetic blobs
  std::size_t synthetic_n = 500;
  std::size_t synthetic_d = 20;
  std::uint64_t seed = 7;
  std::vector<std::string> regularizers = {"l2", "none", "nonconvex"};
  std::vector<std::string> variants = {"npc", "grad"};
  double grad_tol = 1e-10;
  double inner_rtol = 0.01;
  int max_outer = 500;
  double w0_scale = 1.0; // entries of the starting point, alternating signs
};

/// Parses a JSON config file; unknown or ill-typed keys are a validation
/// error listing the offenders.
NewtonExperimentConfig parse_newton_config(const std::string& path);

struct NewtonRunSummary {
  std::string variant;
  std::string regularizer;
  double final_f = 0.0;
  double final_grad_norm = 0.0;
  long oracle_calls = 0;
  int outer_iterations = 0;
  int npc_steps = 0;
  bool converged = false;
  std::string csv_path;
};

std::vector<NewtonRunSummary> run_newton_experiment(const NewtonExperimentConfig& cfg,
                                                    const std::string& outdir);

/// Starting point used by the experiment: entries of magnitude scale with
/// alternating signs, placing the iterate in the saturated sigmoid region
/// where the nonconvex regularizer has negative curvature.
Vector newton_start_point(std::size_t d, double scale);

struct SolveOptions {
  std::string matrix_path;
  std::string rhs_path;   // empty means the all-ones vector
  std::string outdir;     // where the NPC direction is written, if found
  double rtol = 1e-10;
  int maxit = 0;
  bool stop_on_npc = true;
  bool reorthogonalize = false;
};

struct SolveSummary {
  std::string outcome;
  int iterations = 0;
  double relative_residual = 0.0;
  int first_npc = 0;
  std::string npc_path; // file the direction was written to, when applicable
};

SolveSummary run_solve(const SolveOptions& opt);

struct VerifyConfig {
  std::uint64_t seed = 1;
  int trials = 50;
  std::size_t dim_min = 4;
  std::size_t dim_max = 16;
};

struct VerifyRun {
  std::string report_json; // full per-instance report
  long total_checks = 0;
  long total_violations = 0;
  bool pass() const { return total_violations == 0; }
};

/// Random-instance sweep plus the fixed spectral trio; every theorem-backed
/// check group runs on each instance.
VerifyRun run_verify(const VerifyConfig& cfg);

} // namespace minres::experiments
