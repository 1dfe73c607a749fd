#include "gave/solver.hpp"

#include <chrono>

#include "gave/linalg.hpp"

namespace gave {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double metric_value(const ResidualMetrics& m, StopMetric metric) {
  return metric == StopMetric::Rre ? m.rre
                                   : m.rse.value_or(std::numeric_limits<double>::infinity());
}

void validate(const GaveProblem& problem, const StepPolicy& policy,
              const StopRule& stop, const Vector& x0) {
  if (x0.size() != problem.n()) {
    throw std::invalid_argument("x0: expected length " + std::to_string(problem.n()) +
                                ", got " + std::to_string(x0.size()));
  }
  if (stop.tol <= 0.0) throw std::invalid_argument("stop rule: tol must be > 0");
  if (stop.max_iters < 1) throw std::invalid_argument("stop rule: max_iters must be >= 1");
  if (stop.metric == StopMetric::Rse && !problem.known_solution()) {
    throw PreconditionError("RSE stopping requires a known solution on the problem");
  }
  if (policy.mode == StepMode::FixedAlpha &&
      (policy.alpha <= 0.0 || policy.alpha > 1.0)) {
    throw std::invalid_argument("fixed step size must lie in (0, 1], got " +
                                std::to_string(policy.alpha));
  }
  if (policy.mode != StepMode::FixedAlpha && policy.derived_alpha <= 0.0) {
    throw std::invalid_argument(
        "derived step policy has no alpha yet; build it with derive_policy");
  }
}

// n-th singular value: smallest when m >= n, zero (rank deficient) otherwise.
double sigma_n_of(const Matrix& M) {
  if (M.rows() < M.cols()) return 0.0;
  return sigma_min(M);
}

}  // namespace

SolveReport rim_solve(const GaveProblem& problem, const SketchDistribution& dist,
                      const StepPolicy& policy, const StopRule& stop,
                      const Vector& x0, RngStream& rng,
                      const SolveOptions& options) {
  validate(problem, policy, stop, x0);
  if (dist.rows() != problem.m() || dist.cols() != problem.n()) {
    throw std::invalid_argument(
        "sketch distribution dimensions do not match the problem (for SRHT, "
        "pad the problem with pad_rows_pow2 first)");
  }

  const double alpha = policy.effective_alpha();
  const Matrix& A = problem.A();
  const long p = dist.effective_block_size();
  const long stride =
      options.log_every_iteration ? 1 : std::max<long>(1, problem.m() / p);
  const double full_scale = static_cast<double>(p) / static_cast<double>(problem.m());

  SolveReport report;
  report.seed = options.seed_label;
  if (policy.mode != StepMode::FixedAlpha && policy.derived_alpha > 1.0 &&
      !policy.clamp_to_unit) {
    report.note = "derived alpha " + std::to_string(policy.derived_alpha) +
                  " exceeds 1; Algorithm input range is (0, 1]";
  }
  if (policy.kappa_empirical) {
    report.note += report.note.empty() ? "" : "; ";
    report.note += "empirical-kappa";
  }

  Vector x = x0;
  DrawState draw_state;
  double loop_time = 0.0;
  long k = 0;

  auto record = [&](bool& stop_hit) {
    ResidualMetrics m = residual(problem, x);
    HistoryPoint h;
    h.k = k;
    h.full_iters = static_cast<double>(k) * full_scale;
    h.rre = m.rre;
    if (m.rse) h.rse = *m.rse;
    h.wall_time_s = loop_time;
    report.history.push_back(h);
    stop_hit = metric_value(m, stop.metric) <= stop.tol;
  };

  bool stop_hit = false;
  record(stop_hit);
  while (!stop_hit && k < stop.max_iters) {
    const long burst = std::min(stride, stop.max_iters - k);
    const auto t0 = Clock::now();
    for (long s = 0; s < burst; ++s) {
      SketchSample sample = dist.draw(A, rng, &draw_state);
      if (sample.zero_overlap) {
        ++report.skipped_updates;  // 0/0 = 0: the update direction is zero
        ++k;
        continue;
      }
      Vector abs_x = x.cwiseAbs();
      x.noalias() -= alpha * dist.scaled_direction(sample, problem, x, abs_x);
      ++k;
      if (!x.allFinite()) {
        loop_time += seconds_since(t0);
        throw std::runtime_error("rim_solve: iterate became non-finite at iteration " +
                                 std::to_string(k));
      }
    }
    loop_time += seconds_since(t0);
    record(stop_hit);
  }

  report.final_x = std::move(x);
  report.iterations = k;
  report.termination = stop_hit ? Termination::Tolerance : Termination::MaxIters;
  report.full_iterations = static_cast<double>(k) * full_scale;
  report.wall_time_s = loop_time;
  return report;
}

PolicySpectra compute_policy_spectra(const GaveProblem& problem,
                                     const SketchDistribution& dist,
                                     RngStream& rng, long mc_samples) {
  ExpectationH eh = dist.expectation_H(problem.A(), rng, mc_samples);
  Matrix hs = sym_sqrt(eh.H);
  PolicySpectra out;
  out.sigma_n_ha = sigma_n_of(hs * problem.A());
  out.norm_hb = spectral_norm(hs * problem.B());
  out.lambda_min_h = lambda_min_sym(eh.H);
  out.monte_carlo_samples = eh.monte_carlo_samples;
  return out;
}

StepPolicy derive_policy(StepMode mode, const GaveProblem& problem,
                         const SketchDistribution& dist, RngStream& rng,
                         std::optional<double> kappa, std::optional<double> xi,
                         bool kappa_empirical, long mc_samples) {
  if (mode == StepMode::FixedAlpha) {
    throw std::invalid_argument("derive_policy expects a derived mode (gap or errbound)");
  }
  PolicySpectra sp = compute_policy_spectra(problem, dist, rng, mc_samples);
  const double sigma = sp.sigma_n_ha;
  const double c = sp.norm_hb;

  StepPolicy policy;
  policy.mode = mode;
  policy.sigma_n_ha = sigma;
  policy.norm_hb = c;
  policy.lambda_min_h = sp.lambda_min_h;

  if (mode == StepMode::SpectralGap) {
    if (!(sigma > c)) {
      throw PreconditionError(
          "the spectral-gap policy requires sigma_n(H^{1/2}A) > ||H^{1/2}B||_2, got " +
          std::to_string(sigma) + " vs " + std::to_string(c));
    }
    const double xi_lo = (sigma + c) / sigma;
    policy.xi = xi ? *xi : 0.5 * (xi_lo + 2.0);
    if (policy.xi < xi_lo || policy.xi >= 2.0) {
      throw std::invalid_argument("xi must lie in [" + std::to_string(xi_lo) +
                                  ", 2), got " + std::to_string(policy.xi));
    }
    policy.derived_alpha = (2.0 - policy.xi) * sigma / (sigma - c);
    return policy;
  }

  // ErrorBound
  if (!kappa || *kappa <= 0.0) {
    throw PreconditionError(
        "the error-bound policy requires a positive kappa (error-bound constant); supply "
        "one from error_bound_constant or estimate_kappa_empirical");
  }
  const double lk2 = sp.lambda_min_h * (*kappa) * (*kappa);
  const double gap = sigma * sigma - c * c + lk2;
  if (!(sigma * sigma > c * c - lk2)) {
    throw PreconditionError(
        "the error-bound policy requires sigma_n^2(H^{1/2}A) > ||H^{1/2}B||_2^2 - "
        "lambda_min(H) kappa^2; sigma = " + std::to_string(sigma) + ", c = " +
        std::to_string(c) + ", lambda_min(H) kappa^2 = " + std::to_string(lk2));
  }
  policy.kappa = *kappa;
  policy.kappa_empirical = kappa_empirical;
  const double xi_lo = 2.0 * (sigma * sigma - c * c) / gap;
  policy.xi = xi ? *xi : 0.5 * (xi_lo + 2.0);
  if (policy.xi < xi_lo || policy.xi >= 2.0) {
    throw std::invalid_argument("xi must lie in [" + std::to_string(xi_lo) +
                                ", 2), got " + std::to_string(policy.xi));
  }
  policy.derived_alpha = (2.0 - policy.xi) * gap / (2.0 * lk2);
  return policy;
}

double theoretical_rate(const GaveProblem& problem,
                        const SketchDistribution& dist) {
  const Matrix& A = problem.A();
  const Matrix& B = problem.B();
  switch (dist.kind()) {
    case SketchKind::Picard: {
      const double rho = spectral_norm(pseudo_inverse(A) * B);
      if (rho >= 1.0) {
        throw PreconditionError("Picard rate needs ||A^+ B||_2 < 1, got " +
                                std::to_string(rho));
      }
      return rho;  // factor on the norm, not the squared error
    }
    case SketchKind::FullGradient:
    case SketchKind::RowKaczmarz:
    case SketchKind::AverageBlock: {
      const double sn = sigma_n_of(A);
      const double nb = spectral_norm(B);
      if (!(sn > nb)) {
        throw PreconditionError("rate needs sigma_n(A) > ||B||_2, got " +
                                std::to_string(sn) + " vs " + std::to_string(nb));
      }
      double denom = 0.0;
      if (dist.kind() == SketchKind::FullGradient) {
        const double na = spectral_norm(A);
        denom = na * na;
      } else if (dist.kind() == SketchKind::RowKaczmarz) {
        denom = A.squaredNorm();
      } else {
        denom = dist.varpi_norm_sq();
      }
      return std::max(0.0, 1.0 - (sn * sn - nb * nb) / denom);
    }
    case SketchKind::BlockKaczmarz: {
      const double sn = sigma_n_of(A);
      const double nb = spectral_norm(B);
      const double t = static_cast<double>(dist.paving().blocks.size());
      const double lhs = sn * sn / (t * dist.paving().beta2);
      const double rhs = nb * nb / (t * dist.paving().beta1);
      if (!(lhs > rhs)) {
        throw PreconditionError(
            "block Kaczmarz rate needs sigma_n^2(A)/(t beta2) > ||B||_2^2/(t beta1)");
      }
      return std::max(0.0, 1.0 - (lhs - rhs));
    }
    default:
      throw std::invalid_argument(
          std::string("no closed-form rate for sketch kind '") +
          to_string(dist.kind()) + "'");
  }
}

}  // namespace gave
