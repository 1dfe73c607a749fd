#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gave/generators.hpp"
#include "gave/problem.hpp"
#include "gave/solver.hpp"

namespace gave {

/// One solver entry of an experiment: a randomized kind (picard, gradient,
/// rk, rbk, rabk, uniform, countsketch, gaussian, srht) or a deterministic
/// baseline (pim, gnm, map).
struct MethodConfig {
  std::string method = "rk";
  int p = 1;
  int t = 0;                    // rbk paving size (0: ceil(m/p))
  bool without_replacement = false;  // rbk block order mode
  double alpha = 1.0;
  std::string policy = "fixed"; // fixed | gap | errbound
  std::optional<double> xi;
  std::optional<double> kappa;
  bool clamp_alpha = false;     // clamp a derived alpha > 1 back into (0, 1]
  std::string label;            // defaults to method name

  std::string effective_label() const { return label.empty() ? method : label; }
};

struct ExperimentConfig {
  std::optional<GeneratorSpec> generator;  // exactly one of generator/problem_file
  std::string problem_file;
  std::vector<MethodConfig> methods;
  int trials = 20;
  StopRule stop;
  std::uint64_t base_seed = 0;
  std::string output_dir;            // empty: no files written
  bool regenerate_per_trial = false; // new problem per trial (seed + trial)
  bool log_every_iteration = false;
  int jobs = 1;
};

ExperimentConfig experiment_config_from_json(const std::string& text);

struct TrialOutcome {
  bool ok = false;
  std::string error;  // method precondition failures are recorded, not fatal
  SolveReport report;
};

struct MethodOutcome {
  MethodConfig config;
  std::vector<TrialOutcome> trials;
};

struct ExperimentResult {
  std::vector<MethodOutcome> methods;
  std::vector<std::string> files_written;
};

/// Builds the distribution/policy for a method and runs one trial from x0 = 0
/// (w0 = 0 for map). SRHT pads the problem rows to a power of two first.
SolveReport run_method(const GaveProblem& problem, const MethodConfig& method,
                       const StopRule& stop, RngStream stream,
                       bool log_every_iteration = false);

/// Runs trials x methods with per-trial derived seeds (base + trial). Writes,
/// per method, "<label>_trials.csv" with the exact header
/// trial,k,full_iters,rse,rre,wall_time_s, a "<label>_summary.csv" with
/// min/quartile/median/max bands over trials at each recorded k, and a
/// matplotlib script plot.py over the summaries. Trials run concurrently up
/// to cfg.jobs; the merge order is (method, trial), so outputs are
/// reproducible (wall-time columns aside) for a fixed base seed.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

struct MethodRanking {
  std::string label;
  int ok_trials = 0;
  int failed_trials = 0;
  double median_iterations = 0.0;
  double median_full_iterations = 0.0;
  double median_wall_time_s = 0.0;
  double median_setup_time_s = 0.0;
  std::string first_error;
};

/// Per-method medians of iterations / full iterations / wall time to reach
/// the stop rule. Methods whose preconditions reject the problem shape are
/// reported with the structured error instead of aborting the comparison.
std::vector<MethodRanking> compare_methods(const ExperimentConfig& cfg,
                                           ExperimentResult* detail = nullptr);

/// Solver CSV schema shared by `solve` and the experiment outputs:
/// trial,k,full_iters,rse,rre,wall_time_s — one row per history record.
std::string reports_to_csv(const std::vector<SolveReport>& reports);

/// Quantile with linear interpolation between order statistics (the
/// convention the summary CSVs use). q in [0, 1].
double quantile(std::vector<double> values, double q);

/// Shortest round-trip decimal form of a double (CSV cell format).
std::string format_double(double value);

}  // namespace gave
