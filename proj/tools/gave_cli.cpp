// Command line front end: problem generation, solving, certification,
// benchmark runs and LCP bridging.
//
// Exit codes: 0 success, 2 invalid configuration or input,
//             3 method precondition failure in single-solve mode.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <iostream>

#include <gave/baselines.hpp>
#include <gave/certify.hpp>
#include <gave/experiment.hpp>
#include <gave/generators.hpp>
#include <gave/json_io.hpp>
#include <gave/lcp.hpp>
#include <gave/linalg.hpp>
#include <gave/sketch.hpp>
#include <gave/solver.hpp>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitPrecondition = 3;

struct GeneratorFlags {
  int m = 0, n = 0;
  double a_min = 2.0, b_max = 1.0, kappa_a = 1.0, kappa_b = 1.0;
  bool ridge = false;
  double lambda = 0.0, mu = 1.0;
};

void add_generator_flags(CLI::App* cmd, GeneratorFlags& g, bool required) {
  auto* m = cmd->add_option("--m", g.m, "rows");
  auto* n = cmd->add_option("--n", g.n, "columns");
  if (required) {
    m->required();
    n->required();
  }
  cmd->add_option("--a-min", g.a_min, "smallest singular value of A");
  cmd->add_option("--b-max", g.b_max, "spectral norm of B");
  cmd->add_option("--kappa-a", g.kappa_a, "condition number of A");
  cmd->add_option("--kappa-b", g.kappa_b, "condition number of B");
  cmd->add_flag("--ridge", g.ridge, "asymmetric ridge regression instance instead");
  cmd->add_option("--lambda", g.lambda, "ridge penalty on the positive part");
  cmd->add_option("--mu", g.mu, "ridge penalty on the negative part");
}

gave::GaveProblem make_problem(const GeneratorFlags& g, std::uint64_t seed) {
  if (g.ridge) return gave::generate_ridge(g.m, g.n, g.lambda, g.mu, seed);
  gave::GeneratorSpec spec;
  spec.m = g.m;
  spec.n = g.n;
  spec.a_min = g.a_min;
  spec.b_max = g.b_max;
  spec.kappa_a = g.kappa_a;
  spec.kappa_b = g.kappa_b;
  spec.seed = seed;
  return gave::generate_spectral(spec);
}

gave::Matrix load_square_matrix(const std::string& path, const char* what) {
  nlohmann::json j = nlohmann::json::parse(gave::read_text_file(path));
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto& arr = j.at("data");
  if (static_cast<Eigen::Index>(arr.size()) != rows * rows) {
    throw std::invalid_argument(std::string(what) +
                                ": 'data' must hold rows*rows entries, row-major");
  }
  gave::Matrix M(rows, rows);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index jj = 0; jj < rows; ++jj) M(i, jj) = arr[k++].get<double>();
  return M;
}

nlohmann::json vector_json(const gave::Vector& v) {
  return nlohmann::json(std::vector<double>(v.data(), v.data() + v.size()));
}

int run_solve(const std::string& problem_file, const GeneratorFlags& gen,
              bool have_gen, gave::MethodConfig method, gave::StopRule stop,
              std::uint64_t seed, int trials, int jobs,
              const std::string& out_csv) {
  gave::ExperimentConfig cfg;
  if (!problem_file.empty()) {
    cfg.problem_file = problem_file;
  } else if (have_gen) {
    gave::GeneratorSpec spec;
    spec.m = gen.m;
    spec.n = gen.n;
    spec.a_min = gen.a_min;
    spec.b_max = gen.b_max;
    spec.kappa_a = gen.kappa_a;
    spec.kappa_b = gen.kappa_b;
    cfg.generator = spec;
  } else {
    std::cerr << "solve: either --problem or generator flags (--m/--n) are required\n";
    return kExitConfig;
  }
  cfg.methods = {method};
  cfg.trials = trials;
  cfg.stop = stop;
  cfg.base_seed = seed;
  cfg.jobs = jobs;

  gave::ExperimentResult result = gave::run_experiment(cfg);
  const auto& outcomes = result.methods[0].trials;
  std::vector<gave::SolveReport> reports;
  for (const auto& t : outcomes) {
    if (!t.ok) {
      std::cerr << "solve: " << t.error << "\n";
      return kExitPrecondition;
    }
    reports.push_back(t.report);
  }
  const std::string csv = gave::reports_to_csv(reports);
  if (out_csv.empty()) {
    std::cout << csv;
  } else {
    gave::write_text_file(out_csv, csv);
  }
  for (std::size_t t = 0; t < reports.size(); ++t) {
    const auto& r = reports[t];
    std::fprintf(stderr,
                 "trial %zu: %s after %ld iterations (%.2f full), wall %.3fs%s%s\n",
                 t, r.termination == gave::Termination::Tolerance ? "converged" : "max iterations",
                 r.iterations, r.full_iterations, r.wall_time_s,
                 r.note.empty() ? "" : " note: ", r.note.c_str());
  }
  return kExitOk;
}

int run_certify(const std::string& problem_file, const std::string& check,
                const std::string& m_file, int iters, double tol,
                const std::string& out_json) {
  gave::GaveProblem problem = gave::load_problem(problem_file);
  std::optional<gave::Matrix> M;
  if (!m_file.empty()) M = load_square_matrix(m_file, "--M");

  gave::Certificate cert;
  if (check == "interval") {
    cert = gave::check_interval_nonsingular(problem.A(), problem.B());
  } else if (check == "signvec") {
    cert = gave::check_sign_vector_solvable(problem);
  } else if (check == "spectral") {
    cert = gave::check_sufficient_spectral(problem.A(), problem.B(), M);
  } else if (check == "find-m") {
    cert = gave::find_preconditioner(problem.A(), problem.B(), iters, tol);
  } else if (check == "rowdom") {
    cert = gave::check_row_dominance(problem.A(), problem.B());
  } else if (check == "errbound") {
    gave::Matrix Mw =
        M ? *M : gave::Matrix::Identity(problem.m(), problem.m());
    cert = gave::error_bound_constant(problem.A(), problem.B(), Mw);
  } else {
    std::cerr << "certify: unknown check '" << check << "'\n";
    return kExitConfig;
  }
  const std::string text = gave::certificate_to_json(cert);
  if (out_json.empty()) {
    std::cout << text;
  } else {
    gave::write_text_file(out_json, text);
  }
  std::fprintf(stderr, "%s: %s\n", check.c_str(), gave::to_string(cert.verdict));
  return kExitOk;
}

gave::LcpProblem load_lcp(const std::string& path) {
  nlohmann::json j = nlohmann::json::parse(gave::read_text_file(path));
  const auto l = j.at("l").get<Eigen::Index>();
  gave::LcpProblem lcp;
  lcp.Q.resize(l, l);
  const auto& arr = j.at("Q");
  if (static_cast<Eigen::Index>(arr.size()) != l * l) {
    throw std::invalid_argument("lcp: 'Q' must hold l*l entries, row-major");
  }
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < l; ++i)
    for (Eigen::Index jj = 0; jj < l; ++jj) lcp.Q(i, jj) = arr[k++].get<double>();
  lcp.q.resize(l);
  const auto& qa = j.at("q");
  if (static_cast<Eigen::Index>(qa.size()) != l) {
    throw std::invalid_argument("lcp: 'q' must hold l entries");
  }
  for (Eigen::Index i = 0; i < l; ++i) lcp.q(i) = qa[i].get<double>();
  return lcp;
}

int run_lcp(const std::string& in_file, const std::string& via,
            const std::string& solver, std::uint64_t seed, long max_iters,
            double tol, const std::string& out_json) {
  nlohmann::json out;
  if (via == "reduce-to-ave") {
    gave::LcpProblem lcp = load_lcp(in_file);
    gave::LcpToAveReduction red = gave::lcp_to_ave(lcp);
    gave::StopRule stop{gave::StopMetric::Rre, tol * tol, max_iters};
    gave::MethodConfig method;
    method.method = solver;
    gave::SolveReport rep =
        gave::run_method(red.gave, method, stop, gave::RngStream(seed));
    auto [w, z] = red.back_map(rep.final_x);
    gave::LcpSolution sol = gave::verify_lcp(lcp, w, z, 1e-8);
    out["via"] = via;
    out["scale"] = red.scale;
    out["x_ave"] = vector_json(rep.final_x);
    out["w"] = vector_json(sol.w);
    out["z"] = vector_json(sol.z);
    out["comp_residual"] = sol.comp_residual;
    out["valid"] = sol.valid;
    out["ave_rre"] = gave::residual(red.gave, rep.final_x).rre;
  } else if (via == "reform1" || via == "reform2" || via == "reform3") {
    gave::GaveProblem problem = gave::load_problem(in_file);
    gave::AveToLcpReduction red =
        via == "reform1" ? gave::ave_to_lcp_I(problem)
        : via == "reform2" ? gave::ave_to_lcp_II(problem)
                           : gave::ave_to_lcp_III(problem);
    auto sols = gave::enumerate_lcp(red.lcp, 1e-7);
    if (sols.empty()) {
      std::cerr << "lcp: reformulated LCP has no solution at the enumeration "
                   "tolerance\n";
      return kExitPrecondition;
    }
    gave::Vector x = red.recover_x(sols[0].w, sols[0].z);
    out["via"] = via;
    out["l"] = red.lcp.q.size();
    out["w"] = vector_json(sols[0].w);
    out["z"] = vector_json(sols[0].z);
    out["comp_residual"] = sols[0].comp_residual;
    out["x"] = vector_json(x);
    out["ave_rre"] = gave::residual(problem, x).rre;
    out["solutions_found"] = sols.size();
  } else {
    std::cerr << "lcp: unknown route '" << via << "'\n";
    return kExitConfig;
  }
  const std::string text = out.dump(2) + "\n";
  if (out_json.empty()) {
    std::cout << text;
  } else {
    gave::write_text_file(out_json, text);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Randomized iterative solvers, certificates and LCP bridges for "
               "generalized absolute value equations A x - B|x| = b"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand name

  std::uint64_t seed = 0;
  int jobs = 1;
  std::string out_dir;
  app.add_option("--seed", seed, "base random seed")->capture_default_str();
  app.add_option("--jobs", jobs, "max concurrent trials")->capture_default_str();
  app.add_option("--out-dir", out_dir, "output directory for bench runs");

  // --- generate ---
  auto* gen_cmd = app.add_subcommand("generate", "write a problem JSON file");
  GeneratorFlags gen_flags;
  add_generator_flags(gen_cmd, gen_flags, true);
  std::string gen_out;
  gen_cmd->add_option("--out", gen_out, "output problem file")->required();

  // --- solve ---
  auto* solve_cmd = app.add_subcommand("solve", "run one solver on one problem");
  std::string solve_problem;
  GeneratorFlags solve_gen;
  solve_cmd->add_option("--problem", solve_problem, "problem JSON file");
  add_generator_flags(solve_cmd, solve_gen, false);
  gave::MethodConfig method;
  solve_cmd->add_option("--method", method.method,
                        "picard|gradient|rk|rbk|rabk|uniform|countsketch|"
                        "gaussian|srht|pim|gnm|map")
      ->capture_default_str();
  solve_cmd->add_option("--p", method.p, "block size")->capture_default_str();
  solve_cmd->add_option("--t", method.t, "rbk paving size (0: ceil(m/p))");
  solve_cmd->add_flag("--without-replacement", method.without_replacement,
                      "rbk: sweep the paving in shuffled order");
  solve_cmd->add_option("--alpha", method.alpha, "fixed step size in (0,1]")
      ->capture_default_str();
  solve_cmd->add_option("--policy", method.policy, "fixed|gap|errbound")
      ->capture_default_str();
  double xi = 0.0, kappa = 0.0;
  auto* xi_opt = solve_cmd->add_option("--xi", xi, "derived policy xi");
  auto* kappa_opt = solve_cmd->add_option("--kappa", kappa, "error bound constant");
  solve_cmd->add_flag("--clamp-alpha", method.clamp_alpha,
                      "clamp a derived step size > 1 back into (0, 1]");
  std::string metric = "rre";
  gave::StopRule stop;
  solve_cmd->add_option("--metric", metric, "rse|rre")->capture_default_str();
  solve_cmd->add_option("--tol", stop.tol, "stopping tolerance")->capture_default_str();
  solve_cmd->add_option("--max-iters", stop.max_iters, "iteration budget")
      ->capture_default_str();
  int trials = 1;
  solve_cmd->add_option("--trials", trials, "independent trials")->capture_default_str();
  std::string solve_out;
  solve_cmd->add_option("--out", solve_out, "CSV output path (default stdout)");

  // --- certify ---
  auto* cert_cmd = app.add_subcommand("certify", "solvability and error-bound checks");
  std::string cert_problem, cert_check, cert_m, cert_out;
  cert_cmd->add_option("--problem", cert_problem, "problem JSON file")->required();
  cert_cmd->add_option("--check", cert_check,
                       "interval|signvec|spectral|find-m|rowdom|errbound")
      ->required();
  cert_cmd->add_option("--M", cert_m,
                       "square matrix JSON {rows, data} for spectral/errbound");
  int cert_iters = 5000;
  double cert_tol = 1e-9;
  cert_cmd->add_option("--iters", cert_iters, "find-m subgradient budget")
      ->capture_default_str();
  cert_cmd->add_option("--phi-tol", cert_tol, "find-m success margin")
      ->capture_default_str();
  cert_cmd->add_option("--out", cert_out, "certificate JSON path (default stdout)");

  // --- bench ---
  auto* bench_cmd = app.add_subcommand("bench", "multi-method experiment harness");
  std::string bench_config;
  bench_cmd->add_option("--config", bench_config, "experiment config JSON")->required();

  // --- lcp ---
  auto* lcp_cmd = app.add_subcommand("lcp", "LCP <-> AVE reductions");
  std::string lcp_in, lcp_via = "reduce-to-ave", lcp_solver = "gnm", lcp_out;
  lcp_cmd->add_option("--in", lcp_in,
                      "input JSON: {l,Q,q} for reduce-to-ave, a problem file "
                      "(B = I) for reform1|reform2|reform3")
      ->required();
  lcp_cmd->add_option("--via", lcp_via, "reduce-to-ave|reform1|reform2|reform3")
      ->capture_default_str();
  lcp_cmd->add_option("--solver", lcp_solver, "AVE solver for reduce-to-ave")
      ->capture_default_str();
  double lcp_tol = 1e-10;
  long lcp_iters = 200000;
  lcp_cmd->add_option("--tol", lcp_tol, "AVE residual tolerance")->capture_default_str();
  lcp_cmd->add_option("--max-iters", lcp_iters, "AVE iteration budget")
      ->capture_default_str();
  lcp_cmd->add_option("--out", lcp_out, "solution JSON path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (gen_cmd->parsed()) {
      gave::save_problem(make_problem(gen_flags, seed), gen_out);
      std::fprintf(stderr, "wrote %s\n", gen_out.c_str());
      return kExitOk;
    }
    if (solve_cmd->parsed()) {
      if (xi_opt->count() > 0) method.xi = xi;
      if (kappa_opt->count() > 0) method.kappa = kappa;
      if (metric == "rse") {
        stop.metric = gave::StopMetric::Rse;
      } else if (metric == "rre") {
        stop.metric = gave::StopMetric::Rre;
      } else {
        std::cerr << "solve: --metric must be rse or rre\n";
        return kExitConfig;
      }
      const bool have_gen = solve_cmd->count("--m") && solve_cmd->count("--n");
      return run_solve(solve_problem, solve_gen, have_gen, method, stop, seed,
                       trials, jobs, solve_out);
    }
    if (cert_cmd->parsed()) {
      return run_certify(cert_problem, cert_check, cert_m, cert_iters, cert_tol,
                         cert_out);
    }
    if (bench_cmd->parsed()) {
      gave::ExperimentConfig cfg =
          gave::experiment_config_from_json(gave::read_text_file(bench_config));
      if (app.count("--seed")) cfg.base_seed = seed;
      if (app.count("--jobs")) cfg.jobs = jobs;
      if (app.count("--out-dir")) cfg.output_dir = out_dir;
      auto table = gave::compare_methods(cfg);
      std::printf("%-16s %8s %8s %14s %14s %12s\n", "method", "ok", "failed",
                  "median_iters", "median_full", "median_wall");
      for (const auto& row : table) {
        std::printf("%-16s %8d %8d %14.1f %14.2f %12.4f\n", row.label.c_str(),
                    row.ok_trials, row.failed_trials, row.median_iterations,
                    row.median_full_iterations, row.median_wall_time_s);
        if (!row.first_error.empty()) {
          std::printf("    first error: %s\n", row.first_error.c_str());
        }
      }
      return kExitOk;
    }
    if (lcp_cmd->parsed()) {
      return run_lcp(lcp_in, lcp_via, lcp_solver, seed, lcp_iters, lcp_tol, lcp_out);
    }
  } catch (const gave::PreconditionError& e) {
    std::cerr << "precondition failure: " << e.what() << "\n";
    return kExitPrecondition;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}
