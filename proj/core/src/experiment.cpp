#include "gave/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <map>
#include <thread>

#include <json.hpp>

#include "gave/baselines.hpp"
#include "gave/json_io.hpp"
#include "gave/sketch.hpp"

namespace gave {

namespace {

const char* kCsvHeader = "trial,k,full_iters,rse,rre,wall_time_s";

bool is_baseline(const std::string& method) {
  return method == "pim" || method == "gnm" || method == "map";
}

StepMode policy_mode(const std::string& policy) {
  if (policy == "fixed") return StepMode::FixedAlpha;
  if (policy == "gap") return StepMode::SpectralGap;
  if (policy == "errbound") return StepMode::ErrorBound;
  throw std::invalid_argument("unknown step policy: " + policy);
}

GaveProblem resolve_problem(const ExperimentConfig& cfg, std::uint64_t trial) {
  if (cfg.generator && !cfg.problem_file.empty()) {
    throw std::invalid_argument("config: give either a generator or a problem file, not both");
  }
  if (cfg.generator) {
    GeneratorSpec spec = *cfg.generator;
    spec.seed = cfg.regenerate_per_trial ? cfg.base_seed + trial : cfg.base_seed;
    return generate_spectral(spec);
  }
  if (cfg.problem_file.empty()) {
    throw std::invalid_argument("config: either a generator or a problem file is required");
  }
  return load_problem(cfg.problem_file);
}

std::string plot_script() {
  return R"PY(#!/usr/bin/env python3
"""Plots the summary CSVs produced by the experiment harness.

The bold line is the median over trials, the darker band spans the 25th-75th
quantiles and the lighter band the min-max range.
"""
import csv
import glob
import math
import os
import sys

import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))
fig, ax = plt.subplots(figsize=(6, 4.5))
for path in sorted(glob.glob(os.path.join(here, "*_summary.csv"))):
    label = os.path.basename(path)[: -len("_summary.csv")]
    rows = list(csv.DictReader(open(path)))
    metric = "rse" if any(r["rse_med"] != "nan" for r in rows) else "rre"
    xs = [float(r["full_iters"]) for r in rows]
    med = [float(r[metric + "_med"]) for r in rows]
    q25 = [float(r[metric + "_q25"]) for r in rows]
    q75 = [float(r[metric + "_q75"]) for r in rows]
    lo = [float(r[metric + "_min"]) for r in rows]
    hi = [float(r[metric + "_max"]) for r in rows]
    (line,) = ax.plot(xs, med, linewidth=2, label=label)
    ax.fill_between(xs, q25, q75, color=line.get_color(), alpha=0.35)
    ax.fill_between(xs, lo, hi, color=line.get_color(), alpha=0.15)
ax.set_yscale("log")
ax.set_xlabel("full iterations (k p / m)")
ax.set_ylabel("error")
ax.legend()
fig.tight_layout()
out = os.path.join(here, "convergence.png")
fig.savefig(out, dpi=150)
print(out)
)PY";
}

void append_report_rows(std::string& text, std::size_t trial,
                        const SolveReport& report) {
  for (const HistoryPoint& h : report.history) {
    text += std::to_string(trial);
    text += ',';
    text += std::to_string(h.k);
    text += ',';
    text += format_double(h.full_iters);
    text += ',';
    text += format_double(h.rse);
    text += ',';
    text += format_double(h.rre);
    text += ',';
    text += format_double(h.wall_time_s);
    text += '\n';
  }
}

void write_trials_csv(const std::string& path, const MethodOutcome& outcome) {
  std::string text(kCsvHeader);
  text += "\n";
  for (std::size_t trial = 0; trial < outcome.trials.size(); ++trial) {
    if (!outcome.trials[trial].ok) continue;
    append_report_rows(text, trial, outcome.trials[trial].report);
  }
  write_text_file(path, text);
}

void write_summary_csv(const std::string& path, const MethodOutcome& outcome) {
  // Group history points over trials by iteration count.
  struct Cell {
    double full_iters = 0.0;
    std::vector<double> rse, rre;
  };
  std::map<long, Cell> by_k;
  for (const TrialOutcome& t : outcome.trials) {
    if (!t.ok) continue;
    for (const HistoryPoint& h : t.report.history) {
      Cell& cell = by_k[h.k];
      cell.full_iters = h.full_iters;
      cell.rse.push_back(h.rse);
      cell.rre.push_back(h.rre);
    }
  }
  std::string text =
      "k,full_iters,n_trials,rse_min,rse_q25,rse_med,rse_q75,rse_max,"
      "rre_min,rre_q25,rre_med,rre_q75,rre_max\n";
  for (auto& [k, cell] : by_k) {
    text += std::to_string(k);
    text += ',';
    text += format_double(cell.full_iters);
    text += ',';
    text += std::to_string(cell.rse.size());
    for (auto* vals : {&cell.rse, &cell.rre}) {
      for (double q : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        text += ',';
        text += format_double(quantile(*vals, q));
      }
    }
    text += '\n';
  }
  write_text_file(path, text);
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::string reports_to_csv(const std::vector<SolveReport>& reports) {
  std::string text(kCsvHeader);
  text += "\n";
  for (std::size_t trial = 0; trial < reports.size(); ++trial) {
    append_report_rows(text, trial, reports[trial]);
  }
  return text;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const double h = q * static_cast<double>(values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= values.size()) return values.back();
  const double frac = h - static_cast<double>(lo);
  return values[lo] + frac * (values[lo + 1] - values[lo]);
}

SolveReport run_method(const GaveProblem& problem, const MethodConfig& method,
                       const StopRule& stop, RngStream stream,
                       bool log_every_iteration) {
  if (is_baseline(method.method)) {
    if (method.method == "pim") {
      return pim_solve(problem, stop, Vector::Zero(problem.n()));
    }
    if (method.method == "gnm") {
      return gnm_solve(problem, stop, Vector::Zero(problem.n()));
    }
    return map_solve(problem, stop, Vector::Zero(2 * problem.n()));
  }

  SketchKind kind = sketch_kind_from_string(method.method);
  const GaveProblem* prob = &problem;
  std::optional<GaveProblem> padded;
  if (kind == SketchKind::Srht) {
    padded = pad_rows_pow2(problem);
    prob = &*padded;
  }

  RngStream construct_rng = stream.split(0);
  RngStream solve_rng = stream.split(1);
  RngStream policy_rng = stream.split(2);

  SketchDistribution::Options opts;
  opts.p = method.p;
  opts.t = method.t;
  opts.without_replacement = method.without_replacement;
  const auto setup0 = std::chrono::steady_clock::now();
  SketchDistribution dist(kind, prob->A(), opts, construct_rng);

  StepPolicy policy;
  StepMode mode = policy_mode(method.policy);
  if (mode == StepMode::FixedAlpha) {
    policy = StepPolicy::fixed(method.alpha);
  } else {
    policy = derive_policy(mode, *prob, dist, policy_rng, method.kappa, method.xi);
    policy.clamp_to_unit = method.clamp_alpha;
  }
  const double setup_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - setup0).count();

  SolveOptions options;
  options.log_every_iteration = log_every_iteration;
  SolveReport report =
      rim_solve(*prob, dist, policy, stop, Vector::Zero(prob->n()), solve_rng, options);
  report.setup_time_s += setup_time;
  return report;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  if (cfg.trials < 1) throw std::invalid_argument("config: trials must be >= 1");
  if (cfg.methods.empty()) throw std::invalid_argument("config: no methods given");

  ExperimentResult result;
  result.methods.resize(cfg.methods.size());
  for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
    result.methods[mi].config = cfg.methods[mi];
    result.methods[mi].trials.resize(cfg.trials);
  }

  std::optional<GaveProblem> shared;
  if (!cfg.regenerate_per_trial) shared = resolve_problem(cfg, 0);

  struct Task {
    std::size_t method;
    int trial;
  };
  std::vector<Task> tasks;
  for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi)
    for (int t = 0; t < cfg.trials; ++t) tasks.push_back({mi, t});

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t id = next.fetch_add(1);
      if (id >= tasks.size()) return;
      const Task task = tasks[id];
      TrialOutcome& out = result.methods[task.method].trials[task.trial];
      try {
        const GaveProblem problem =
            shared ? *shared : resolve_problem(cfg, static_cast<std::uint64_t>(task.trial));
        RngStream stream(cfg.base_seed + static_cast<std::uint64_t>(task.trial),
                         1 + task.method);
        out.report = run_method(problem, cfg.methods[task.method], cfg.stop,
                                stream, cfg.log_every_iteration);
        out.report.seed = cfg.base_seed + static_cast<std::uint64_t>(task.trial);
        out.ok = true;
      } catch (const std::exception& e) {
        out.ok = false;
        out.error = e.what();
      }
    }
  };

  const int jobs = std::max(1, std::min<int>(cfg.jobs, static_cast<int>(tasks.size())));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (int i = 0; i < jobs; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  if (!cfg.output_dir.empty()) {
    std::filesystem::create_directories(cfg.output_dir);
    for (const MethodOutcome& outcome : result.methods) {
      const std::string base = cfg.output_dir + "/" + outcome.config.effective_label();
      write_trials_csv(base + "_trials.csv", outcome);
      write_summary_csv(base + "_summary.csv", outcome);
      result.files_written.push_back(base + "_trials.csv");
      result.files_written.push_back(base + "_summary.csv");
    }
    const std::string plot_path = cfg.output_dir + "/plot.py";
    write_text_file(plot_path, plot_script());
    result.files_written.push_back(plot_path);
  }
  return result;
}

std::vector<MethodRanking> compare_methods(const ExperimentConfig& cfg,
                                           ExperimentResult* detail) {
  ExperimentResult result = run_experiment(cfg);
  std::vector<MethodRanking> table;
  for (const MethodOutcome& outcome : result.methods) {
    MethodRanking row;
    row.label = outcome.config.effective_label();
    std::vector<double> iters, fulls, walls, setups;
    for (const TrialOutcome& t : outcome.trials) {
      if (!t.ok) {
        ++row.failed_trials;
        if (row.first_error.empty()) row.first_error = t.error;
        continue;
      }
      ++row.ok_trials;
      iters.push_back(static_cast<double>(t.report.iterations));
      fulls.push_back(t.report.full_iterations);
      walls.push_back(t.report.wall_time_s);
      setups.push_back(t.report.setup_time_s);
    }
    if (row.ok_trials > 0) {
      row.median_iterations = quantile(iters, 0.5);
      row.median_full_iterations = quantile(fulls, 0.5);
      row.median_wall_time_s = quantile(walls, 0.5);
      row.median_setup_time_s = quantile(setups, 0.5);
    }
    table.push_back(std::move(row));
  }
  if (!cfg.output_dir.empty()) {
    std::string text =
        "method,ok_trials,failed_trials,median_iterations,median_full_iters,"
        "median_wall_time_s,median_setup_time_s,first_error\n";
    for (const MethodRanking& row : table) {
      text += row.label + ',' + std::to_string(row.ok_trials) + ',' +
              std::to_string(row.failed_trials) + ',' +
              format_double(row.median_iterations) + ',' +
              format_double(row.median_full_iterations) + ',' +
              format_double(row.median_wall_time_s) + ',' +
              format_double(row.median_setup_time_s) + ',' + "\"" +
              row.first_error + "\"\n";
    }
    std::filesystem::create_directories(cfg.output_dir);
    write_text_file(cfg.output_dir + "/compare.csv", text);
    result.files_written.push_back(cfg.output_dir + "/compare.csv");
  }
  if (detail) *detail = std::move(result);
  return table;
}

ExperimentConfig experiment_config_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  ExperimentConfig cfg;
  if (j.contains("generator")) {
    const auto& g = j["generator"];
    GeneratorSpec spec;
    spec.m = g.at("m").get<int>();
    spec.n = g.at("n").get<int>();
    if (g.contains("a_min")) spec.a_min = g["a_min"].get<double>();
    if (g.contains("b_max")) spec.b_max = g["b_max"].get<double>();
    if (g.contains("kappa_a")) spec.kappa_a = g["kappa_a"].get<double>();
    if (g.contains("kappa_b")) spec.kappa_b = g["kappa_b"].get<double>();
    cfg.generator = spec;
  }
  if (j.contains("problem_file")) cfg.problem_file = j["problem_file"].get<std::string>();
  if (j.contains("trials")) cfg.trials = j["trials"].get<int>();
  if (j.contains("seed")) cfg.base_seed = j["seed"].get<std::uint64_t>();
  if (j.contains("output_dir")) cfg.output_dir = j["output_dir"].get<std::string>();
  if (j.contains("regenerate_per_trial"))
    cfg.regenerate_per_trial = j["regenerate_per_trial"].get<bool>();
  if (j.contains("log_every_iteration"))
    cfg.log_every_iteration = j["log_every_iteration"].get<bool>();
  if (j.contains("jobs")) cfg.jobs = j["jobs"].get<int>();
  if (j.contains("stop")) {
    const auto& s = j["stop"];
    if (s.contains("metric")) {
      const std::string metric = s["metric"].get<std::string>();
      if (metric == "rse") {
        cfg.stop.metric = StopMetric::Rse;
      } else if (metric == "rre") {
        cfg.stop.metric = StopMetric::Rre;
      } else {
        throw std::invalid_argument("config: stop metric must be rse or rre");
      }
    }
    if (s.contains("tol")) cfg.stop.tol = s["tol"].get<double>();
    if (s.contains("max_iters")) cfg.stop.max_iters = s["max_iters"].get<long>();
  }
  if (!j.contains("methods") || !j["methods"].is_array() || j["methods"].empty()) {
    throw std::invalid_argument("config: a nonempty 'methods' array is required");
  }
  for (const auto& m : j["methods"]) {
    MethodConfig mc;
    // "kind" is accepted as an alias for "method" (sketch config spelling)
    if (m.contains("kind") && !m.contains("method")) {
      mc.method = m["kind"].get<std::string>();
    } else {
      mc.method = m.at("method").get<std::string>();
    }
    if (m.contains("p")) mc.p = m["p"].get<int>();
    if (m.contains("t")) mc.t = m["t"].get<int>();
    if (m.contains("without_replacement"))
      mc.without_replacement = m["without_replacement"].get<bool>();
    if (m.contains("clamp_alpha")) mc.clamp_alpha = m["clamp_alpha"].get<bool>();
    if (m.contains("alpha")) mc.alpha = m["alpha"].get<double>();
    if (m.contains("policy")) mc.policy = m["policy"].get<std::string>();
    if (m.contains("xi")) mc.xi = m["xi"].get<double>();
    if (m.contains("kappa")) mc.kappa = m["kappa"].get<double>();
    if (m.contains("label")) mc.label = m["label"].get<std::string>();
    cfg.methods.push_back(std::move(mc));
  }
  return cfg;
}

}  // namespace gave
