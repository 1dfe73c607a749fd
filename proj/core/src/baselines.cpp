#include "gave/baselines.hpp"

#include <Eigen/Dense>
#include <chrono>
#include <set>

#include "gave/linalg.hpp"

namespace gave {

namespace {

using Clock = std::chrono::steady_clock;

double metric_value(const ResidualMetrics& m, StopMetric metric) {
  return metric == StopMetric::Rre ? m.rre
                                   : m.rse.value_or(std::numeric_limits<double>::infinity());
}

void validate_stop(const GaveProblem& problem, const StopRule& stop) {
  if (stop.tol <= 0.0) throw std::invalid_argument("stop rule: tol must be > 0");
  if (stop.metric == StopMetric::Rse && !problem.known_solution()) {
    throw PreconditionError("RSE stopping requires a known solution on the problem");
  }
}

// Shared deterministic iteration driver: step(x) -> next x, metrics each step.
template <typename StepFn>
SolveReport run_deterministic(const GaveProblem& problem, const StopRule& stop,
                              Vector x, double full_iters_per_step, StepFn step) {
  SolveReport report;
  double loop_time = 0.0;
  long k = 0;
  bool stop_hit = false;
  auto record = [&]() {
    ResidualMetrics m = residual(problem, x);
    HistoryPoint h;
    h.k = k;
    h.full_iters = full_iters_per_step * static_cast<double>(k);
    h.rre = m.rre;
    if (m.rse) h.rse = *m.rse;
    h.wall_time_s = loop_time;
    report.history.push_back(h);
    stop_hit = metric_value(m, stop.metric) <= stop.tol;
  };
  record();
  while (!stop_hit && k < stop.max_iters) {
    const auto t0 = Clock::now();
    x = step(std::move(x), k);
    ++k;
    loop_time += std::chrono::duration<double>(Clock::now() - t0).count();
    if (!x.allFinite()) {
      throw std::runtime_error("iterate became non-finite at iteration " +
                               std::to_string(k));
    }
    record();
  }
  report.final_x = std::move(x);
  report.iterations = k;
  report.termination = stop_hit ? Termination::Tolerance : Termination::MaxIters;
  report.full_iterations = full_iters_per_step * static_cast<double>(k);
  report.wall_time_s = loop_time;
  return report;
}

}  // namespace

SolveReport pim_solve(const GaveProblem& problem, const StopRule& stop,
                      const Vector& x0) {
  validate_stop(problem, stop);
  if (x0.size() != problem.n()) {
    throw std::invalid_argument("x0 has wrong length");
  }
  Vector sv = singular_values(problem.A());
  if (problem.m() < problem.n() || !(sv(sv.size() - 1) > 1e-12 * sv(0))) {
    throw PreconditionError("pim_solve requires A of full column rank");
  }
  const auto setup0 = Clock::now();
  Matrix pinv = pseudo_inverse(problem.A());
  const double setup_time = std::chrono::duration<double>(Clock::now() - setup0).count();

  SolveReport report = run_deterministic(
      problem, stop, x0, 1.0, [&](Vector x, long) -> Vector {
        Vector r = problem.A() * x - problem.B() * x.cwiseAbs() - problem.b();
        x.noalias() -= pinv * r;
        return x;
      });
  report.setup_time_s = setup_time;
  return report;
}

SolveReport gnm_solve(const GaveProblem& problem, const StopRule& stop,
                      const Vector& x0) {
  validate_stop(problem, stop);
  if (problem.m() != problem.n()) {
    throw PreconditionError("gnm_solve requires a square problem (m = n)");
  }
  if (x0.size() != problem.n()) {
    throw std::invalid_argument("x0 has wrong length");
  }
  const auto n = problem.n();

  auto sign_of = [](double v) { return v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0); };
  std::set<std::vector<signed char>> seen_patterns;

  return run_deterministic(problem, stop, x0, 1.0, [&](Vector x, long k) -> Vector {
    std::vector<signed char> pattern(n);
    Vector d(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      d(i) = sign_of(x(i));
      pattern[i] = static_cast<signed char>(d(i));
    }
    if (!seen_patterns.insert(pattern).second) {
      std::string pat;
      for (auto c : pattern) pat += c > 0 ? '+' : (c < 0 ? '-' : '0');
      throw std::runtime_error(
          "gnm_solve: sign pattern " + pat + " repeated at iteration " +
          std::to_string(k) + " without convergence (cycle)");
    }
    Matrix J = problem.A() - problem.B() * d.asDiagonal();
    Eigen::PartialPivLU<Matrix> lu(J);
    Vector next = lu.solve(problem.b());
    if ((J * next - problem.b()).norm() >
        1e-8 * std::max(1.0, problem.b().norm())) {
      std::string pat;
      for (auto c : pattern) pat += c > 0 ? '+' : (c < 0 ? '-' : '0');
      throw std::runtime_error("gnm_solve: A - B D is singular for sign pattern " + pat);
    }
    return next;
  });
}

MapState make_map_state(const GaveProblem& problem) {
  MapState s;
  const auto n = problem.n();
  s.T.resize(problem.m(), 2 * n);
  s.T.leftCols(n) = problem.A() - problem.B();
  s.T.rightCols(n) = -problem.A() - problem.B();
  s.T_pinv = pseudo_inverse(s.T);
  return s;
}

Vector map_project_affine(const MapState& state, const GaveProblem& problem,
                          const Vector& w) {
  return w - state.T_pinv * (state.T * w - std::numbers::sqrt2 * problem.b());
}

Vector map_project_cone(const Vector& w) {
  const Eigen::Index n = w.size() / 2;
  Vector z = Vector::Zero(2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double u = w(i), v = w(n + i);
    if (u > v) {
      z(i) = std::max(u, 0.0);
    } else {
      z(n + i) = std::max(v, 0.0);  // ties take the (0, (v_i)_+) branch
    }
  }
  return z;
}

SolveReport map_solve(const GaveProblem& problem, const StopRule& stop,
                      const Vector& w0) {
  validate_stop(problem, stop);
  const auto n = problem.n();
  if (w0.size() != 2 * n) {
    throw std::invalid_argument("map_solve: w0 must have length 2n");
  }
  const auto setup0 = Clock::now();
  MapState state = make_map_state(problem);
  const double setup_time = std::chrono::duration<double>(Clock::now() - setup0).count();

  Vector w = w0;
  SolveReport report;
  double loop_time = 0.0;
  long k = 0;
  bool stop_hit = false;
  auto recover_x = [&]() -> Vector {
    return (w.head(n) - w.tail(n)) / std::numbers::sqrt2;
  };
  auto record = [&]() {
    ResidualMetrics m = residual(problem, recover_x());
    HistoryPoint h;
    h.k = k;
    h.full_iters = 2.0 * static_cast<double>(k);  // one sweep = two passes
    h.rre = m.rre;
    if (m.rse) h.rse = *m.rse;
    h.wall_time_s = loop_time;
    report.history.push_back(h);
    stop_hit = metric_value(m, stop.metric) <= stop.tol;
  };
  record();
  while (!stop_hit && k < stop.max_iters) {
    const auto t0 = Clock::now();
    w = map_project_affine(state, problem, map_project_cone(w));
    ++k;
    loop_time += std::chrono::duration<double>(Clock::now() - t0).count();
    if (!w.allFinite()) {
      throw std::runtime_error("map_solve: iterate became non-finite");
    }
    record();
  }
  report.final_x = recover_x();
  report.iterations = k;
  report.termination = stop_hit ? Termination::Tolerance : Termination::MaxIters;
  report.full_iterations = 2.0 * static_cast<double>(k);
  report.wall_time_s = loop_time;
  report.setup_time_s = setup_time;
  return report;
}

}  // namespace gave
