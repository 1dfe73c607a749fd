#pragma once

#include <optional>
#include <string>

#include "gave/problem.hpp"
#include "gave/rng.hpp"

namespace gave {

enum class CertificateKind {
  UniqueSolvableIntervalDet,  // det(A + B D_s) sign test over all vertices
  SolvableSignVector,         // feasibility of (A D_s - B) y = b, y >= 0
  SufficientSpectral,         // sigma_l(MA) > ||MB||_2
  RowDominance,               // |A_{i,:}| < B_{i,:} for some row
  ErrorBound,                 // kappa = sigma_n(MA) - ||MB||_2
};

enum class Verdict { Holds, Fails, Inconclusive };

const char* to_string(CertificateKind kind);
const char* to_string(Verdict verdict);

struct Certificate {
  CertificateKind kind;
  Verdict verdict = Verdict::Inconclusive;
  std::optional<Vector> witness_sign;   // vertex / sign vector s
  std::optional<Matrix> preconditioner; // M
  std::optional<int> witness_index;     // row index (dominance)
  std::optional<Vector> witness_x;      // reconstructed solution
  std::optional<double> sigma_ell_ma;   // sigma_l(MA)
  std::optional<double> norm_mb;        // ||MB||_2
  std::optional<double> kappa_bound;    // sigma_n(MA) - ||MB||_2
  std::optional<double> phi_value;      // lambda_1(B^T M B) - lambda_l(A^T M A)
  std::optional<double> det_min_abs;    // smallest |det| over vertices
  std::string detail;
};

std::string certificate_to_json(const Certificate& cert);

/// Unique solvability for every right-hand side: m = n and det(A + B D_s)
/// nonzero with a common sign over all s in {-1,1}^n. The reduction to
/// vertices rests on multilinearity of the determinant in the diagonal of D.
/// m != n is definitionally Fails; n > 20 returns Inconclusive.
Certificate check_interval_nonsingular(const Matrix& A, const Matrix& B);

/// Solvability of this particular instance: some s in {-1,1}^n admits
/// y >= 0 with (A D_s - B) y = b (then x = D_s y solves the equation).
/// Feasibility is decided by nonnegative least squares at tolerance
/// 1e-8 * max(1, ||b||). n > 20 returns Inconclusive.
Certificate check_sign_vector_solvable(const GaveProblem& problem);

/// sigma_l(MA) > ||MB||_2 for l = min(m, n); M defaults to the identity and
/// must be nonsingular. Holds certifies: solvability for every b (m < n),
/// a unique solution for every b (m = n), at most one solution (m > n).
Certificate check_sufficient_spectral(const Matrix& A, const Matrix& B,
                                      const std::optional<Matrix>& M = std::nullopt);

/// Convex objective of the preconditioner search over {M : M >= I}:
///   Phi(M) = lambda_1(B^T M B) - sigma_l^2(M^{1/2} A).
/// Phi(M) < 0 certifies sigma_l(M^{1/2}A) > ||M^{1/2}B||_2.
double phi_objective(const Matrix& A, const Matrix& B, const Matrix& M);

/// Projected subgradient descent on phi_objective with steps c/sqrt(k),
/// c = 1/(||A||_2^2 + ||B||_2^2). On success the certificate carries the
/// certifying matrix (M*)^{1/2}. A first-order method cannot prove
/// infeasibility, so budget exhaustion yields Inconclusive, not Fails.
Certificate find_preconditioner(const Matrix& A, const Matrix& B,
                                int iters = 5000, double tol = 1e-9);

/// Some row satisfies |A_{i,:}| < B_{i,:} componentwise (strict), which makes
/// zero the unique solution of A x - B |x| = 0.
Certificate check_row_dominance(const Matrix& A, const Matrix& B);

/// Constructive error-bound constant kappa = sigma_n(MA) - ||MB||_2 > 0 with
///   kappa ||x - x*||_2 <= ||A x - B|x| - b||_{M^T M}  for all x.
/// Requires m >= n and a certifying M.
Certificate error_bound_constant(const Matrix& A, const Matrix& B,
                                 const Matrix& M);

/// Empirical lower-bound estimate of the (non-constructive) global error
/// bound constant: the minimum of ||F(x) - b|| / ||x - x*|| over Gaussian
/// perturbations at radii {1e-3, 1e-1, 1, 10} ||x*||, one quarter of the
/// samples each. Requires a known solution.
double estimate_kappa_empirical(const GaveProblem& problem, int samples,
                                RngStream& rng);

}  // namespace gave
