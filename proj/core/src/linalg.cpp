#include "gave/linalg.hpp"

#include <Eigen/Dense>

namespace gave {

Vector singular_values(const Matrix& M) {
  // BDCSVD falls back to Jacobi below its blocking threshold, so small
  // problems keep full Jacobi accuracy.
  Eigen::BDCSVD<Matrix> svd(M);
  return svd.singularValues();
}

double spectral_norm(const Matrix& M) {
  if (M.size() == 0) return 0.0;
  return singular_values(M)(0);
}

double sigma_min(const Matrix& M) {
  Vector s = singular_values(M);
  return s(s.size() - 1);
}

Matrix pseudo_inverse(const Matrix& M, double rcond) {
  Eigen::BDCSVD<Matrix> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  const double cutoff = rcond * (s.size() > 0 ? s(0) : 0.0);
  Vector inv = Vector::Zero(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > cutoff) inv(i) = 1.0 / s(i);
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

Matrix sym_sqrt(const Matrix& M) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(M);
  Vector lam = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
}

double lambda_min_sym(const Matrix& M) {
  return Eigen::SelfAdjointEigenSolver<Matrix>(M, Eigen::EigenvaluesOnly)
      .eigenvalues()
      .minCoeff();
}

double lambda_max_sym(const Matrix& M) {
  return Eigen::SelfAdjointEigenSolver<Matrix>(M, Eigen::EigenvaluesOnly)
      .eigenvalues()
      .maxCoeff();
}

Matrix select_rows(const Matrix& M, const std::vector<int>& rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), M.cols());
  for (std::size_t k = 0; k < rows.size(); ++k) out.row(k) = M.row(rows[k]);
  return out;
}

Vector select_entries(const Vector& v, const std::vector<int>& rows) {
  Vector out(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) out(k) = v(rows[k]);
  return out;
}

}  // namespace gave
