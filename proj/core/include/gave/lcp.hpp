#pragma once

#include <utility>
#include <vector>

#include "gave/problem.hpp"

namespace gave {

/// Linear complementarity problem: find w = Q z + q, w^T z = 0, w, z >= 0.
struct LcpProblem {
  Matrix Q;
  Vector q;
};

struct LcpSolution {
  Vector w;
  Vector z;
  double comp_residual = 0.0;  // max of equation, sign and complementarity violations
  bool valid = false;
};

/// comp_residual = max(|w^T z|, ||min(w,0)||_inf, ||min(z,0)||_inf,
///                     ||w - Qz - q||_inf); valid iff <= tol.
LcpSolution verify_lcp(const LcpProblem& lcp, const Vector& w, const Vector& z,
                       double tol = 1e-8);

/// LCP expressed as a square AVE  A x - |x| = b  with
/// A = (Q-I)^{-1}(I+Q), b = (Q-I)^{-1} q. If Q - I is singular, (Q, q) is
/// rescaled once by 1/(2||Q||_2), which forces the spectrum of the scaled Q
/// into a disk excluding 1. back_map recovers the LCP pair from an AVE
/// solution; the scale only touches w.
struct LcpToAveReduction {
  GaveProblem gave;
  double scale = 1.0;
  std::pair<Vector, Vector> back_map(const Vector& x) const;  // -> (w, z)
};

LcpToAveReduction lcp_to_ave(const LcpProblem& lcp);

enum class AveReformulation {
  I,    // Q = (A-I)^{-1}(A+I); needs A - I nonsingular; x = w - z
  II,   // 3n x 3n block LCP, no assumptions; x = z_1 - z_2
  III,  // index selection, size n, no assumptions; x = (y - s)/2
};

/// LCP reformulation of a standard AVE (B = I, m = n) plus its back-map.
struct AveToLcpReduction {
  AveReformulation reformulation;
  LcpProblem lcp;
  std::vector<int> selected;  // Reformulation III index set
  Vector recover_x(const Vector& w, const Vector& z) const;
};

AveToLcpReduction ave_to_lcp_I(const GaveProblem& problem);
AveToLcpReduction ave_to_lcp_II(const GaveProblem& problem);
AveToLcpReduction ave_to_lcp_III(const GaveProblem& problem);

/// Greedy column scan of Algorithm "linear independence-based index
/// selection": at step k keep index k iff the accumulated columns, P_{:,k}
/// and the tail sums {P_{:,j} + Q_{:,j}}_{j>k} stay linearly independent.
/// Requires rank(P + Q) = m. The assembled columns (P_{:,k} for k kept,
/// Q_{:,k} otherwise) are guaranteed nonsingular.
std::vector<int> select_indices(const Matrix& P, const Matrix& Q);

/// Brute-force oracle: enumerates all 2^l complementary bases, solves each
/// linear system and keeps the sign-feasible solutions (deduplicated,
/// lexicographic basis order). Capped at l <= 12.
std::vector<LcpSolution> enumerate_lcp(const LcpProblem& lcp, double tol = 1e-8);

}  // namespace gave
