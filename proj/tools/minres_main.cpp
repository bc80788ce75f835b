#include <cstdio>
#include <exception>
#include <iostream>

#include <CLI11.hpp>

#include "minres/experiments.hpp"

namespace {

int cmd_fig1(const std::string& outdir, std::uint64_t seed) {
  const auto summaries = minres::experiments::run_fig1(outdir, seed);
  for (const auto& s : summaries) {
    std::printf("%s: iterations=%d first_npc=%d final_relres=%.3e  -> %s\n", s.name.c_str(),
                s.iterations, s.first_npc, s.final_relres, s.csv_path.c_str());
  }
  std::printf("summary: %s/fig1_summary.json\n", outdir.c_str());
  return 0;
}

int cmd_newton(const std::string& config_path, const std::string& outdir,
               minres::experiments::NewtonExperimentConfig cfg) {
  if (!config_path.empty()) cfg = minres::experiments::parse_newton_config(config_path);
  const auto summaries = minres::experiments::run_newton_experiment(cfg, outdir);
  for (const auto& s : summaries) {
    std::printf("%s/%s: outer=%d oracle_calls=%ld npc_steps=%d final_gradnorm=%.3e %s\n",
                s.variant.c_str(), s.regularizer.c_str(), s.outer_iterations, s.oracle_calls,
                s.npc_steps, s.final_grad_norm, s.converged ? "converged" : "not-converged");
  }
  return 0;
}

int cmd_solve(const minres::experiments::SolveOptions& opt) {
  const auto s = minres::experiments::run_solve(opt);
  std::printf("outcome: %s\niterations: %d\nrelative_residual: %.6e\n", s.outcome.c_str(),
              s.iterations, s.relative_residual);
  if (s.first_npc > 0) std::printf("first_npc_iteration: %d\n", s.first_npc);
  if (!s.npc_path.empty()) std::printf("npc_direction: %s\n", s.npc_path.c_str());
  return 0;
}

int cmd_verify(const minres::experiments::VerifyConfig& cfg) {
  const auto run = minres::experiments::run_verify(cfg);
  std::cout << run.report_json;
  return run.pass() ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"MINRES with built-in nonpositive-curvature detection"};
  app.require_subcommand(1);

  std::uint64_t seed = 2024;
  std::string outdir = "out";

  auto* fig1 = app.add_subcommand("fig1", "spectral experiment on the d=20 construction");
  fig1->add_option("--seed", seed, "random seed");
  fig1->add_option("--out", outdir, "output directory");

  auto* newton = app.add_subcommand("newton", "Newton-MR vs Newton-MR-grad comparison");
  std::string newton_config;
  minres::experiments::NewtonExperimentConfig ncfg;
  newton->add_option("--config", newton_config, "JSON config file (overrides other flags)");
  newton->add_option("--seed", ncfg.seed, "random seed for the synthetic dataset");
  newton->add_option("--out", outdir, "output directory");
  newton->add_option("--dataset", ncfg.dataset_csv, "label-first CSV dataset");
  newton->add_option("--n", ncfg.synthetic_n, "synthetic sample count");
  newton->add_option("--d", ncfg.synthetic_d, "synthetic feature dimension");
  newton->add_option("--max-outer", ncfg.max_outer, "outer iteration cap");

  auto* solve = app.add_subcommand("solve", "solve a user-supplied symmetric system");
  minres::experiments::SolveOptions sopt;
  solve->add_option("matrix", sopt.matrix_path, "Matrix Market or dense text matrix")
      ->required();
  solve->add_option("rhs", sopt.rhs_path, "right-hand side, one value per line (default: ones)");
  solve->add_option("--out", sopt.outdir, "directory for the NPC direction file");
  solve->add_option("--rtol", sopt.rtol, "relative residual tolerance");
  solve->add_option("--maxit", sopt.maxit, "iteration cap (0: the dimension)");
  solve->add_flag("--stop-on-npc,!--continue", sopt.stop_on_npc,
                  "stop at the first NPC direction (default) or keep iterating");
  solve->add_flag("--reorth", sopt.reorthogonalize, "full reorthogonalization");

  auto* verify = app.add_subcommand("verify", "run the theorem verification suite");
  minres::experiments::VerifyConfig vcfg;
  verify->add_option("--seed", vcfg.seed, "random seed");
  verify->add_option("--trials", vcfg.trials, "number of random instances");

  CLI11_PARSE(app, argc, argv);

  try {
    if (fig1->parsed()) return cmd_fig1(outdir, seed);
    if (newton->parsed()) return cmd_newton(newton_config, outdir, ncfg);
    if (solve->parsed()) return cmd_solve(sopt);
    if (verify->parsed()) return cmd_verify(vcfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
