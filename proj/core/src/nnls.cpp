#include "gave/nnls.hpp"

#include <Eigen/QR>
#include <vector>

namespace gave {

namespace {

// Least squares over the passive columns; returns the full-length vector with
// zeros on the active (clamped) set.
Vector passive_ls(const Matrix& A, const Vector& b, const std::vector<int>& passive) {
  Matrix Ap(A.rows(), static_cast<Eigen::Index>(passive.size()));
  for (std::size_t k = 0; k < passive.size(); ++k) Ap.col(k) = A.col(passive[k]);
  Vector zp = Ap.colPivHouseholderQr().solve(b);
  Vector z = Vector::Zero(A.cols());
  for (std::size_t k = 0; k < passive.size(); ++k) z(passive[k]) = zp(k);
  return z;
}

}  // namespace

NnlsResult nnls(const Matrix& A, const Vector& b, int max_outer) {
  const Eigen::Index n = A.cols();
  if (A.rows() != b.size()) {
    throw std::invalid_argument("nnls: A and b row counts differ");
  }
  if (max_outer < 0) max_outer = static_cast<int>(3 * n) + 10;

  Vector x = Vector::Zero(n);
  std::vector<bool> in_passive(n, false);
  std::vector<int> passive;
  Vector w = A.transpose() * b;
  const double dual_tol = 1e-12 * std::max(1.0, w.cwiseAbs().maxCoeff());

  NnlsResult out;
  out.outer_iterations = 0;
  for (int outer = 0; outer < max_outer; ++outer) {
    out.outer_iterations = outer;
    // Most violated dual coordinate outside the passive set.
    int best = -1;
    double best_w = dual_tol;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!in_passive[j] && w(j) > best_w) {
        best_w = w(j);
        best = static_cast<int>(j);
      }
    }
    if (best < 0) break;  // KKT satisfied
    in_passive[best] = true;
    passive.push_back(best);

    Vector z = passive_ls(A, b, passive);
    // Inner loop: back off along x -> z until the passive iterate is positive.
    int guard = static_cast<int>(n) + 2;
    while (guard-- > 0) {
      double min_z = 0.0;
      for (int j : passive) min_z = std::min(min_z, z(j));
      if (min_z > 0.0) break;
      double alpha = 1.0;
      for (int j : passive) {
        if (z(j) <= 0.0) {
          const double step = x(j) / (x(j) - z(j));
          alpha = std::min(alpha, step);
        }
      }
      x += alpha * (z - x);
      std::vector<int> keep;
      for (int j : passive) {
        if (x(j) > 1e-14) {
          keep.push_back(j);
        } else {
          x(j) = 0.0;
          in_passive[j] = false;
        }
      }
      passive = std::move(keep);
      if (passive.empty()) {
        z = Vector::Zero(n);
        break;
      }
      z = passive_ls(A, b, passive);
    }
    x = z;
    w = A.transpose() * (b - A * x);
  }

  out.x = x;
  out.residual_norm = (A * x - b).norm();
  return out;
}

}  // namespace gave
