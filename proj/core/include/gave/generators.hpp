#pragma once

#include <cstdint>

#include "gave/problem.hpp"

namespace gave {

/// Parameters of the spectral test-problem generator: A = U1 D V1^T and
/// B = U2 P V2^T with column-orthogonal factors and prescribed diagonals, so
/// that sigma_r(A) = a_min, ||B||_2 = b_max and cond(A) = kappa_a,
/// cond(B) = kappa_b with r = min(m, n).
struct GeneratorSpec {
  int m = 0;
  int n = 0;
  double a_min = 2.0;
  double b_max = 1.0;
  double kappa_a = 1.0;
  double kappa_b = 1.0;
  std::uint64_t seed = 0;
};

/// Generates a problem with known spectrum and a stored Gaussian solution x*
/// (b is set to A x* - B |x*|). Deterministic given spec.seed.
/// Requires m, n >= 2: the diagonal formulas divide by r - 1.
GaveProblem generate_spectral(const GeneratorSpec& spec);

/// Asymmetric ridge regression instance
///   (L^T L + (mu + lambda) I) x - (mu - lambda) |x| = L^T c
/// from explicitly supplied data L (m x n) and c (m).
/// lambda == mu is the classical ridge case and is rejected.
GaveProblem make_ridge_problem(const Matrix& L, const Vector& c, double lambda,
                               double mu);

/// Same, with the entries of L and c drawn uniformly from [-5, 5].
GaveProblem generate_ridge(int m, int n, double lambda, double mu,
                           std::uint64_t seed);

}  // namespace gave
