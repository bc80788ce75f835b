#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "minres/experiments.hpp"
#include "minres/io.hpp"
#include "minres/jacobi.hpp"

using namespace minres;

namespace {

std::filesystem::path temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / name;
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

} // namespace

TEST_CASE("spectral construction pins the prescribed eigenvalues") {
  const experiments::Fig1Matrices mats = experiments::build_fig1_matrices(2024);
  const std::vector<double> top = experiments::fig1_top_spectrum();
  REQUIRE(top.size() == 19);
  CHECK(top.front() == doctest::Approx(1.0));
  CHECK(top.back() == doctest::Approx(1000.0));

  const auto eig_a = oracle::jacobi_eigen(mats.a);
  CHECK(std::abs(eig_a.eigenvalues.front() - 0.0) <= 1e-8);
  for (int i = 0; i < 19; ++i) {
    CHECK(std::abs(eig_a.eigenvalues[i + 1] - top[i]) <= 1e-8);
  }

  const auto eig_b = oracle::jacobi_eigen(mats.b);
  CHECK(std::abs(eig_b.eigenvalues.front() - (-1.0)) <= 1e-8);
  for (int i = 0; i < 19; ++i) {
    CHECK(std::abs(eig_b.eigenvalues[i + 1] - top[i]) <= 1e-8);
  }

  const auto eig_c = oracle::jacobi_eigen(mats.c);
  CHECK(std::abs(eig_c.eigenvalues[0] - (-10.0)) <= 1e-8);
  CHECK(std::abs(eig_c.eigenvalues[1] - (-1.0)) <= 1e-8);
  // the top 18 eigenvalues of C coincide with those of A and B
  for (int i = 0; i < 18; ++i) {
    CHECK(std::abs(eig_c.eigenvalues[i + 2] - top[i + 1]) <= 1e-8);
  }
}

TEST_CASE("the three constructions use different frames") {
  const experiments::Fig1Matrices mats = experiments::build_fig1_matrices(5);
  CHECK(mats.a.at(0, 1) != mats.b.at(0, 1));
  CHECK(mats.b.at(0, 1) != mats.c.at(0, 1));
}

TEST_CASE("fig1 run: NPC at the last iteration for the singular instance only") {
  const auto dir = temp_dir("minres_fig1_test");
  const auto summaries = experiments::run_fig1(dir.string(), 2024);
  REQUIRE(summaries.size() == 3);

  const auto& a = summaries[0];
  CHECK(a.name == "A");
  CHECK(a.first_npc == a.iterations);
  CHECK(a.first_npc > 1);

  const auto& b = summaries[1];
  CHECK(b.first_npc > 0);
  CHECK(b.first_npc < b.iterations);
  const auto& c = summaries[2];
  CHECK(c.first_npc > 0);
  CHECK(c.first_npc < c.iterations);
}

TEST_CASE("fig1 outputs are byte-identical across runs with the same seed") {
  const auto dir1 = temp_dir("minres_fig1_det1");
  const auto dir2 = temp_dir("minres_fig1_det2");
  experiments::run_fig1(dir1.string(), 99);
  experiments::run_fig1(dir2.string(), 99);
  for (const char* name : {"fig1_A.csv", "fig1_B.csv", "fig1_C.csv"}) {
    CHECK(slurp((dir1 / name).string()) == slurp((dir2 / name).string()));
  }
}

TEST_CASE("fig1 csv columns carry the monitored quantities") {
  const auto dir = temp_dir("minres_fig1_cols");
  experiments::run_fig1(dir.string(), 7);
  std::ifstream in((dir / "fig1_A.csv").string());
  std::string header;
  std::getline(in, header);
  CHECK(header == "iter,lambda_min_T,xTr,m,xnorm,xTb,relres,npc");
  std::string row;
  int rows = 0;
  while (std::getline(in, row)) ++rows;
  CHECK(rows == 20);
}

TEST_CASE("solve command round-trips an exported matrix") {
  const auto dir = temp_dir("minres_solve_cmd");
  DenseSymmetric ident(3);
  for (int i = 0; i < 3; ++i) ident.set(i, i, 1.0);
  const auto mpath = (dir / "identity.mtx").string();
  io::write_matrix_market(mpath, ident);
  const auto rhs = (dir / "e1.txt").string();
  io::write_vector(rhs, Vector{1, 0, 0});

  experiments::SolveOptions opt;
  opt.matrix_path = mpath;
  opt.rhs_path = rhs;
  const auto summary = experiments::run_solve(opt);
  CHECK(summary.outcome == "solution");
  CHECK(summary.iterations == 1);
  CHECK(summary.relative_residual <= 1e-12);
}

TEST_CASE("solve command reports an NPC direction for the negated identity") {
  const auto dir = temp_dir("minres_solve_npc");
  DenseSymmetric neg(3);
  for (int i = 0; i < 3; ++i) neg.set(i, i, -1.0);
  const auto mpath = (dir / "neg_identity.mtx").string();
  io::write_matrix_market(mpath, neg);

  experiments::SolveOptions opt;
  opt.matrix_path = mpath;
  opt.outdir = dir.string();
  const auto summary = experiments::run_solve(opt);
  CHECK(summary.outcome == "npc_direction");
  CHECK(summary.first_npc == 1);
  REQUIRE(!summary.npc_path.empty());
  CHECK(io::read_vector(summary.npc_path) == Vector{1, 1, 1}); // direction = b
}

TEST_CASE("solve command rejects a mismatched rhs") {
  const auto dir = temp_dir("minres_solve_bad");
  DenseSymmetric ident(3);
  for (int i = 0; i < 3; ++i) ident.set(i, i, 1.0);
  const auto mpath = (dir / "identity.mtx").string();
  io::write_matrix_market(mpath, ident);
  const auto rhs = (dir / "short.txt").string();
  io::write_vector(rhs, Vector{1, 0});

  experiments::SolveOptions opt;
  opt.matrix_path = mpath;
  opt.rhs_path = rhs;
  CHECK_THROWS_AS(experiments::run_solve(opt), std::invalid_argument);
}

TEST_CASE("verify with zero trials runs only the fixed spectral trio") {
  experiments::VerifyConfig cfg;
  cfg.trials = 0;
  cfg.seed = 2024;
  const auto run = experiments::run_verify(cfg);
  CHECK(run.pass());
  CHECK(run.total_checks > 0);
  CHECK(run.report_json.find("fig1_A") != std::string::npos);
  CHECK(run.report_json.find("random_0") == std::string::npos);
}

TEST_CASE("newton config validation lists offending keys") {
  const auto dir = temp_dir("minres_newton_cfg");
  const auto good = (dir / "good.json").string();
  {
    std::ofstream out(good);
    out << R"({"synthetic_n": 40, "synthetic_d": 4, "seed": 3, "variants": ["npc"]})";
  }
  const auto cfg = experiments::parse_newton_config(good);
  CHECK(cfg.synthetic_n == 40);
  CHECK(cfg.variants == std::vector<std::string>{"npc"});

  const auto bad = (dir / "bad.json").string();
  {
    std::ofstream out(bad);
    out << R"({"synthetic_n": "many", "bogus": 1})";
  }
  try {
    experiments::parse_newton_config(bad);
    FAIL("expected a validation error");
  } catch (const std::invalid_argument& e) {
    const std::string what = e.what();
    CHECK(what.find("synthetic_n") != std::string::npos);
    CHECK(what.find("bogus") != std::string::npos);
  }
}

TEST_CASE("newton experiment emits one csv per variant and regularizer") {
  const auto dir = temp_dir("minres_newton_exp");
  experiments::NewtonExperimentConfig cfg;
  cfg.synthetic_n = 40;
  cfg.synthetic_d = 4;
  cfg.seed = 11;
  cfg.regularizers = {"l2"};
  cfg.max_outer = 50;
  const auto summaries = experiments::run_newton_experiment(cfg, dir.string());
  REQUIRE(summaries.size() == 2);
  for (const auto& s : summaries) {
    CHECK(std::filesystem::exists(s.csv_path));
    CHECK(s.converged);
  }
  CHECK(std::filesystem::exists(dir / "newton_summary.json"));
}

TEST_CASE("an exported spectral matrix re-solves to the same outcome") {
  const auto dir = temp_dir("minres_solve_roundtrip");
  const experiments::Fig1Matrices mats = experiments::build_fig1_matrices(2024);
  const auto mpath = (dir / "fig1_A.mtx").string();
  io::write_matrix_market(mpath, mats.a);

  // the same run cmd_fig1 performs, via file round-trip
  experiments::SolveOptions opt;
  opt.matrix_path = mpath;
  opt.rtol = 0.0;
  opt.stop_on_npc = false;
  opt.reorthogonalize = true;
  const auto from_file = experiments::run_solve(opt);

  const auto direct = experiments::run_fig1_instance(mats.a, "A", dir.string());
  CHECK(from_file.iterations == direct.iterations);
  CHECK(from_file.first_npc == direct.first_npc);
  CHECK(from_file.outcome == "solution");
  CHECK(from_file.relative_residual == direct.final_relres);
}

TEST_CASE("newton experiment outputs are byte-identical across runs") {
  const auto dir1 = temp_dir("minres_newton_det1");
  const auto dir2 = temp_dir("minres_newton_det2");
  experiments::NewtonExperimentConfig cfg;
  cfg.synthetic_n = 60;
  cfg.synthetic_d = 5;
  cfg.seed = 9;
  cfg.regularizers = {"nonconvex"};
  experiments::run_newton_experiment(cfg, dir1.string());
  experiments::run_newton_experiment(cfg, dir2.string());
  for (const char* name : {"newton_npc_nonconvex.csv", "newton_grad_nonconvex.csv"}) {
    CHECK(slurp((dir1 / name).string()) == slurp((dir2 / name).string()));
    CHECK(!slurp((dir1 / name).string()).empty());
  }
}

TEST_CASE("newton experiment consumes a csv dataset") {
  const auto dir = temp_dir("minres_newton_csv");
  const auto data = (dir / "data.csv").string();
  {
    std::ofstream out(data);
    CounterRng rng(13);
    for (int i = 0; i < 40; ++i) {
      out << (i % 2);
      for (int j = 0; j < 3; ++j) out << "," << io::format_double(rng.normal() + (i % 2));
      out << "\n";
    }
  }
  experiments::NewtonExperimentConfig cfg;
  cfg.dataset_csv = data;
  cfg.regularizers = {"l2"};
  cfg.variants = {"npc"};
  const auto summaries = experiments::run_newton_experiment(cfg, dir.string());
  REQUIRE(summaries.size() == 1);
  CHECK(summaries[0].converged);
}
