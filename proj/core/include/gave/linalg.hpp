#pragma once

#include "gave/problem.hpp"

namespace gave {

/// All singular values of M, descending.
Vector singular_values(const Matrix& M);

/// ||M||_2 = sigma_1(M).
double spectral_norm(const Matrix& M);

/// sigma_l(M) with l = min(rows, cols), i.e. the smallest singular value.
double sigma_min(const Matrix& M);

/// Moore-Penrose pseudoinverse via SVD. Singular values below
/// rcond * sigma_1 are treated as zero.
Matrix pseudo_inverse(const Matrix& M, double rcond = 1e-13);

/// Symmetric PSD square root via eigendecomposition (negative eigenvalues
/// from roundoff are clamped to zero).
Matrix sym_sqrt(const Matrix& M);

/// Extreme eigenvalues of a symmetric matrix.
double lambda_min_sym(const Matrix& M);
double lambda_max_sym(const Matrix& M);

/// Rows of M indexed by J, as a dense block.
Matrix select_rows(const Matrix& M, const std::vector<int>& rows);
Vector select_entries(const Vector& v, const std::vector<int>& rows);

}  // namespace gave
