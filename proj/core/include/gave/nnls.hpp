#pragma once

#include "gave/problem.hpp"

namespace gave {

struct NnlsResult {
  Vector x;              // argmin ||A x - b|| over x >= 0
  double residual_norm;  // ||A x - b||_2 at the solution
  int outer_iterations;
};

/// Lawson-Hanson active set method for min ||A x - b||_2 s.t. x >= 0.
/// Finite termination; least-squares subproblems are solved by column-pivoted
/// QR. The dual tolerance defaults to a small multiple of ||A^T b||_inf.
NnlsResult nnls(const Matrix& A, const Vector& b, int max_outer = -1);

}  // namespace gave
