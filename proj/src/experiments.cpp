#include "minres/experiments.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "minres/io.hpp"
#include "minres/kernels.hpp"

namespace minres::experiments {

using nlohmann::json;

std::vector<double> fig1_top_spectrum() {
  std::vector<double> top(19);
  for (int i = 0; i < 19; ++i) top[i] = std::pow(10.0, 3.0 * i / 18.0);
  return top;
}

namespace {

DenseSymmetric goe_with_spectrum(CounterRng& rng, const std::vector<double>& spectrum) {
  const DenseSymmetric goe = gaussian_orthogonal_ensemble(spectrum.size(), rng);
  const oracle::EigenDecomposition eig = oracle::jacobi_eigen(goe);
  return from_spectrum(spectrum, eig.eigenvectors);
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open file for writing: " + path);
  out << content;
}

} // namespace

Fig1Matrices build_fig1_matrices(std::uint64_t seed) {
  CounterRng rng(seed);
  const std::vector<double> top = fig1_top_spectrum();

  std::vector<double> spec_a = {0.0};
  spec_a.insert(spec_a.end(), top.begin(), top.end());

  std::vector<double> spec_b = {-1.0};
  spec_b.insert(spec_b.end(), top.begin(), top.end());

  std::vector<double> spec_c = {-10.0, -1.0};
  spec_c.insert(spec_c.end(), top.begin() + 1, top.end()); // shares the top 18 with A and B

  Fig1Matrices out;
  out.a = goe_with_spectrum(rng, spec_a);
  out.b = goe_with_spectrum(rng, spec_b);
  out.c = goe_with_spectrum(rng, spec_c);
  return out;
}

Fig1Summary run_fig1_instance(const DenseSymmetric& m, const std::string& name,
                              const std::string& outdir) {
  Vector ones(m.dim(), 1.0);
  MinresConfig cfg;
  cfg.rtol = 0.0;
  cfg.maxit = static_cast<int>(m.dim());
  cfg.stop_on_npc = false;
  cfg.reorthogonalize = true;
  cfg.diagnostics = true;
  const SolveOutcome out = minres_solve(m, ones, cfg);

  Fig1Summary summary;
  summary.name = name;
  summary.iterations = out.iterations;
  summary.first_npc = out.first_npc_iteration;
  summary.final_relres = out.final_relres();
  if (out.first_npc_iteration > 0) {
    summary.npc_curvature = out.trace.rows[out.first_npc_iteration - 1].curvature;
  }
  summary.csv_path = (std::filesystem::path(outdir) / ("fig1_" + name + ".csv")).string();
  std::ofstream csv(summary.csv_path);
  if (!csv) throw std::runtime_error("cannot open file for writing: " + summary.csv_path);
  out.trace.write_csv(csv);
  return summary;
}

std::vector<Fig1Summary> run_fig1(const std::string& outdir, std::uint64_t seed) {
  std::filesystem::create_directories(outdir);
  const Fig1Matrices mats = build_fig1_matrices(seed);
  std::vector<Fig1Summary> summaries;
  summaries.push_back(run_fig1_instance(mats.a, "A", outdir));
  summaries.push_back(run_fig1_instance(mats.b, "B", outdir));
  summaries.push_back(run_fig1_instance(mats.c, "C", outdir));

  json j;
  j["experiment"] = "fig1";
  j["seed"] = seed;
  j["dim"] = fig1_dim;
  j["rhs"] = "ones";
  j["top_spectrum"] = fig1_top_spectrum();
  for (const Fig1Summary& s : summaries) {
    j["runs"][s.name] = {{"iterations", s.iterations},
                         {"first_npc", s.first_npc},
                         {"final_relres", s.final_relres},
                         {"npc_curvature", s.npc_curvature},
                         {"csv", s.csv_path}};
  }
  write_text((std::filesystem::path(outdir) / "fig1_summary.json").string(), j.dump(2) + "\n");
  return summaries;
}

namespace {

newton::Regularizer parse_regularizer(const std::string& name) {
  if (name == "none") return newton::Regularizer::None;
  if (name == "l2") return newton::Regularizer::L2;
  if (name == "nonconvex") return newton::Regularizer::Nonconvex;
  throw std::invalid_argument("unknown regularizer '" + name + "'");
}

newton::Variant parse_variant(const std::string& name) {
  if (name == "npc") return newton::Variant::Npc;
  if (name == "grad") return newton::Variant::Grad;
  throw std::invalid_argument("unknown variant '" + name + "'");
}

} // namespace

Vector newton_start_point(std::size_t d, double scale) {
  Vector w0(d);
  for (std::size_t j = 0; j < d; ++j) w0[j] = (j % 2 == 0 ? scale : -scale);
  return w0;
}

NewtonExperimentConfig parse_newton_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::invalid_argument("config parse error in " + path + ": " + e.what());
  }

  NewtonExperimentConfig cfg;
  std::vector<std::string> bad_keys;
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "dataset") {
        cfg.dataset_csv = value.is_null() ? "" : value.get<std::string>();
      } else if (key == "synthetic_n") {
        cfg.synthetic_n = value.get<std::size_t>();
      } else if (key == "synthetic_d") {
        cfg.synthetic_d = value.get<std::size_t>();
      } else if (key == "seed") {
        cfg.seed = value.get<std::uint64_t>();
      } else if (key == "regularizers") {
        cfg.regularizers = value.get<std::vector<std::string>>();
      } else if (key == "variants") {
        cfg.variants = value.get<std::vector<std::string>>();
      } else if (key == "grad_tol") {
        cfg.grad_tol = value.get<double>();
      } else if (key == "inner_rtol") {
        cfg.inner_rtol = value.get<double>();
      } else if (key == "max_outer") {
        cfg.max_outer = value.get<int>();
      } else if (key == "w0_scale") {
        cfg.w0_scale = value.get<double>();
      } else {
        bad_keys.push_back(key);
      }
    } catch (const json::exception&) {
      bad_keys.push_back(key + " (wrong type)");
    }
  }
  if (!bad_keys.empty()) {
    std::string msg = "invalid config keys:";
    for (const auto& k : bad_keys) msg += " " + k;
    throw std::invalid_argument(msg);
  }
  for (const auto& r : cfg.regularizers) parse_regularizer(r);
  for (const auto& v : cfg.variants) parse_variant(v);
  return cfg;
}

std::vector<NewtonRunSummary> run_newton_experiment(const NewtonExperimentConfig& cfg,
                                                    const std::string& outdir) {
  std::filesystem::create_directories(outdir);

  newton::NlsProblem base;
  if (!cfg.dataset_csv.empty()) {
    const io::LabeledDataset ds = io::read_label_csv(cfg.dataset_csv);
    base.features = ds.features;
    base.labels = ds.labels;
  } else {
    base = newton::make_blobs(cfg.synthetic_n, cfg.synthetic_d, cfg.seed);
  }

  newton::NewtonConfig ncfg;
  ncfg.grad_tol = cfg.grad_tol;
  ncfg.inner_rtol = cfg.inner_rtol;
  ncfg.max_outer = cfg.max_outer;

  const Vector w0 = newton_start_point(base.d(), cfg.w0_scale);

  std::vector<NewtonRunSummary> summaries;
  json j;
  j["experiment"] = "newton";
  j["seed"] = cfg.seed;
  j["n"] = base.n();
  j["d"] = base.d();
  j["dataset"] = cfg.dataset_csv.empty() ? "synthetic" : cfg.dataset_csv;
  j["w0_scale"] = cfg.w0_scale;

  for (const std::string& reg_name : cfg.regularizers) {
    for (const std::string& var_name : cfg.variants) {
      newton::NlsProblem prob = base;
      prob.reg = parse_regularizer(reg_name);
      const newton::NewtonResult res =
          newton::newton_mr_run(prob, w0, parse_variant(var_name), ncfg);

      NewtonRunSummary s;
      s.variant = var_name;
      s.regularizer = reg_name;
      s.converged = res.converged;
      s.oracle_calls = res.oracles.total();
      s.outer_iterations = static_cast<int>(res.trace.rows.size());
      for (const auto& row : res.trace.rows) {
        if (row.npc_used) ++s.npc_steps;
      }
      if (!res.trace.rows.empty()) {
        s.final_f = res.trace.rows.back().f;
        s.final_grad_norm = res.trace.rows.back().grad_norm;
      }
      s.csv_path =
          (std::filesystem::path(outdir) / ("newton_" + var_name + "_" + reg_name + ".csv"))
              .string();
      std::ofstream csv(s.csv_path);
      if (!csv) throw std::runtime_error("cannot open file for writing: " + s.csv_path);
      res.trace.write_csv(csv);

      j["runs"].push_back({{"variant", s.variant},
                           {"regularizer", s.regularizer},
                           {"converged", s.converged},
                           {"termination", res.trace.termination},
                           {"oracle_calls", s.oracle_calls},
                           {"outer_iterations", s.outer_iterations},
                           {"npc_steps", s.npc_steps},
                           {"final_f", s.final_f},
                           {"final_grad_norm", s.final_grad_norm},
                           {"csv", s.csv_path}});
      summaries.push_back(std::move(s));
    }
  }
  write_text((std::filesystem::path(outdir) / "newton_summary.json").string(), j.dump(2) + "\n");
  return summaries;
}

SolveSummary run_solve(const SolveOptions& opt) {
  const DenseSymmetric m = io::read_matrix_auto(opt.matrix_path);
  Vector b;
  if (opt.rhs_path.empty()) {
    b.assign(m.dim(), 1.0);
  } else {
    b = io::read_vector(opt.rhs_path);
    if (b.size() != m.dim()) {
      throw std::invalid_argument("rhs length " + std::to_string(b.size()) +
                                  " does not match matrix dimension " + std::to_string(m.dim()));
    }
  }

  MinresConfig cfg;
  cfg.rtol = opt.rtol;
  cfg.maxit = opt.maxit;
  cfg.stop_on_npc = opt.stop_on_npc;
  cfg.reorthogonalize = opt.reorthogonalize;
  const SolveOutcome out = minres_solve(m, b, cfg);

  SolveSummary s;
  s.iterations = out.iterations;
  s.relative_residual = out.final_relres();
  s.first_npc = out.first_npc_iteration;
  switch (out.kind) {
    case OutcomeKind::Solution:
      s.outcome = "solution";
      break;
    case OutcomeKind::NPCDirection:
      s.outcome = "npc_direction";
      break;
    case OutcomeKind::MaxIterations:
      s.outcome = "max_iterations";
      break;
  }
  if (out.npc_direction.has_value() && !opt.outdir.empty()) {
    std::filesystem::create_directories(opt.outdir);
    s.npc_path = (std::filesystem::path(opt.outdir) / "npc_direction.txt").string();
    io::write_vector(s.npc_path, *out.npc_direction);
  }
  return s;
}

VerifyRun run_verify(const VerifyConfig& cfg) {
  CounterRng rng(cfg.seed);
  json instances = json::array();
  long checks = 0;
  long violations = 0;

  auto record = [&](const std::string& name, const oracle::InstanceReport& report) {
    json inst;
    inst["instance"] = name;
    inst["checks"] = report.total_checks();
    inst["violations"] = report.all_violations();
    instances.push_back(inst);
    checks += report.total_checks();
    violations += report.total_violations();
  };

  for (int t = 0; t < cfg.trials; ++t) {
    const std::size_t span = cfg.dim_max - cfg.dim_min + 1;
    const std::size_t d = cfg.dim_min + static_cast<std::size_t>(rng.next_u64() % span);
    const DenseSymmetric a = gaussian_orthogonal_ensemble(d, rng);
    Vector b(d);
    for (std::size_t i = 0; i < d; ++i) b[i] = rng.normal();
    record("random_" + std::to_string(t) + "_d" + std::to_string(d),
           oracle::verify_instance(a, b));
  }

  const Fig1Matrices mats = build_fig1_matrices(cfg.seed);
  Vector ones(fig1_dim, 1.0);
  record("fig1_A", oracle::verify_instance(mats.a, ones));
  record("fig1_B", oracle::verify_instance(mats.b, ones));
  record("fig1_C", oracle::verify_instance(mats.c, ones));

  VerifyRun run;
  run.total_checks = checks;
  run.total_violations = violations;
  json j;
  j["seed"] = cfg.seed;
  j["trials"] = cfg.trials;
  j["total_checks"] = checks;
  j["total_violations"] = violations;
  j["pass"] = (violations == 0);
  j["instances"] = instances;
  run.report_json = j.dump(2) + "\n";
  return run;
}

} // namespace minres::experiments
