#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gave/problem.hpp"
#include "gave/rng.hpp"
#include "gave/sketch.hpp"

namespace gave {

enum class StepMode { FixedAlpha, SpectralGap, ErrorBound };

/// Step-size policy for the randomized iteration. FixedAlpha uses a constant
/// alpha in (0, 1]; the derived modes compute alpha from spectral quantities of
/// H^{1/2}A and H^{1/2}B (see derive_policy).
struct StepPolicy {
  StepMode mode = StepMode::FixedAlpha;
  double alpha = 1.0;           // FixedAlpha
  double xi = 0.0;              // derived modes
  double kappa = 0.0;           // ErrorBound mode constant kappa
  bool kappa_empirical = false; // kappa came from sampling, not a certificate
  double derived_alpha = 0.0;
  bool clamp_to_unit = false;   // clamp a derived alpha > 1 back into (0, 1]

  // Spectral quantities the derivation used (diagnostics).
  double sigma_n_ha = 0.0;   // sigma_n(H^{1/2} A)
  double norm_hb = 0.0;      // ||H^{1/2} B||_2
  double lambda_min_h = 0.0; // lambda_min(H)

  static StepPolicy fixed(double alpha) {
    StepPolicy p;
    p.mode = StepMode::FixedAlpha;
    p.alpha = alpha;
    return p;
  }

  double effective_alpha() const {
    double a = mode == StepMode::FixedAlpha ? alpha : derived_alpha;
    return clamp_to_unit ? std::min(a, 1.0) : a;
  }
};

enum class StopMetric { Rse, Rre };

struct StopRule {
  StopMetric metric = StopMetric::Rre;
  double tol = 1e-12;
  long max_iters = 100000;
};

enum class Termination { Tolerance, MaxIters };

struct HistoryPoint {
  long k = 0;
  double full_iters = 0.0;  // k * p / m
  double rse = std::numeric_limits<double>::quiet_NaN();
  double rre = 0.0;
  double wall_time_s = 0.0;  // cumulative iteration-loop time at this record
};

struct SolveReport {
  Vector final_x;
  long iterations = 0;
  Termination termination = Termination::MaxIters;
  std::vector<HistoryPoint> history;
  double full_iterations = 0.0;
  std::uint64_t seed = 0;
  double wall_time_s = 0.0;   // iteration loop only
  double setup_time_s = 0.0;  // pavings, pseudoinverses, policy derivation
  long skipped_updates = 0;   // draws with S^T A = 0 (update defined as zero)
  std::string note;
};

struct SolveOptions {
  bool log_every_iteration = false;  // default stride is max(1, m/p)
  std::uint64_t seed_label = 0;      // recorded in the report
};

/// Randomized iterative method:
///   x^{k+1} = x^k - alpha * A^T S_k S_k^T (A x^k - B |x^k| - b) / ||S_k^T A||_2^2
/// with S_k drawn from dist each iteration. Metrics are recorded at k = 0,
/// every max(1, m/p) iterations, and at termination, so different block sizes
/// are comparable in full iterations. Draws with S^T A = 0 contribute a zero
/// update and are counted. A NaN/Inf iterate aborts with a diagnostic.
SolveReport rim_solve(const GaveProblem& problem, const SketchDistribution& dist,
                      const StepPolicy& policy, const StopRule& stop,
                      const Vector& x0, RngStream& rng,
                      const SolveOptions& options = {});

/// Spectral quantities of the distribution on a problem: sigma_n(H^{1/2}A),
/// ||H^{1/2}B||_2, lambda_min(H). H is exact where a closed form exists and
/// Monte Carlo otherwise.
struct PolicySpectra {
  double sigma_n_ha = 0.0;
  double norm_hb = 0.0;
  double lambda_min_h = 0.0;
  long monte_carlo_samples = 0;
};

PolicySpectra compute_policy_spectra(const GaveProblem& problem,
                                     const SketchDistribution& dist,
                                     RngStream& rng, long mc_samples = 100000);

/// Derives the step size from the distribution's spectral quantities:
///   SpectralGap: alpha = (2-xi) sigma / (sigma - c), needs sigma > c,
///               xi in [(sigma + c)/sigma, 2)
///   ErrorBound : alpha = (2-xi)(sigma^2 - c^2 + l k^2)/(2 l k^2), needs
///               sigma^2 > c^2 - l k^2, xi in [2(sigma^2-c^2)/(sigma^2-c^2+l k^2), 2)
/// with sigma = sigma_n(H^{1/2}A), c = ||H^{1/2}B||_2, l = lambda_min(H).
/// xi defaults to the midpoint of its admissible interval. the ErrorBound mode needs a
/// kappa (from an error-bound certificate or an empirical estimate).
StepPolicy derive_policy(StepMode mode, const GaveProblem& problem,
                         const SketchDistribution& dist, RngStream& rng,
                         std::optional<double> kappa = std::nullopt,
                         std::optional<double> xi = std::nullopt,
                         bool kappa_empirical = false, long mc_samples = 100000);

/// Per-iteration contraction factor at alpha = 1 for the kinds with a stated
/// closed form. This is the factor on the squared error for RowKaczmarz,
/// AverageBlock, FullGradient and BlockKaczmarz, and the factor on the norm
/// (not squared) for Picard, which contracts linearly at rate ||A^+ B||_2.
double theoretical_rate(const GaveProblem& problem,
                        const SketchDistribution& dist);

}  // namespace gave
