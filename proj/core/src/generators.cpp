#include "gave/generators.hpp"

#include <Eigen/QR>

#include "gave/rng.hpp"

namespace gave {

namespace {

Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, RngStream& rng) {
  Matrix out(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) out(i, j) = rng.normal();
  return out;
}

Vector gaussian_vector(Eigen::Index size, RngStream& rng) {
  Vector out(size);
  for (Eigen::Index i = 0; i < size; ++i) out(i) = rng.normal();
  return out;
}

// Thin Q factor (cols orthonormal) of a standard Gaussian draw.
Matrix random_orthogonal(Eigen::Index rows, Eigen::Index cols, RngStream& rng) {
  Matrix G = gaussian_matrix(rows, cols, rng);
  Eigen::HouseholderQR<Matrix> qr(G);
  return Matrix(qr.householderQ()).leftCols(cols);
}

}  // namespace

GaveProblem generate_spectral(const GeneratorSpec& spec) {
  if (spec.m < 2 || spec.n < 2) {
    throw std::invalid_argument(
        "generate_spectral requires m, n >= 2 (diagonal formulas divide by r-1)");
  }
  if (spec.a_min <= 0 || spec.b_max <= 0) {
    throw std::invalid_argument("generate_spectral requires a_min > 0 and b_max > 0");
  }
  if (spec.kappa_a < 1 || spec.kappa_b < 1) {
    throw std::invalid_argument("generate_spectral requires kappa_a, kappa_b >= 1");
  }

  const int r = std::min(spec.m, spec.n);
  RngStream rng(spec.seed);

  Matrix U1 = random_orthogonal(spec.m, r, rng);
  Matrix V1 = random_orthogonal(spec.n, r, rng);
  Matrix U2 = random_orthogonal(spec.m, r, rng);
  Matrix V2 = random_orthogonal(spec.n, r, rng);

  Vector D(r), P(r);
  for (int i = 0; i < r; ++i) {
    const double t = static_cast<double>(i) / (r - 1);
    D(i) = spec.a_min + t * (spec.kappa_a - 1.0) * spec.a_min;
    P(i) = spec.b_max / spec.kappa_b + t * (1.0 - 1.0 / spec.kappa_b) * spec.b_max;
  }

  Matrix A = U1 * D.asDiagonal() * V1.transpose();
  Matrix B = U2 * P.asDiagonal() * V2.transpose();
  Vector xs = gaussian_vector(spec.n, rng);
  Vector b = A * xs - B * xs.cwiseAbs();
  return GaveProblem(std::move(A), std::move(B), std::move(b), std::move(xs),
                     spec.seed);
}

GaveProblem make_ridge_problem(const Matrix& L, const Vector& c, double lambda,
                               double mu) {
  if (lambda == mu) {
    throw std::invalid_argument(
        "ridge generator requires lambda != mu (lambda == mu is classical ridge)");
  }
  if (lambda < 0 || mu < 0) {
    throw std::invalid_argument("ridge generator requires lambda, mu >= 0");
  }
  if (L.rows() != c.size()) {
    throw std::invalid_argument("ridge generator: L and c row counts differ");
  }
  const Eigen::Index n = L.cols();
  Matrix A = L.transpose() * L + (mu + lambda) * Matrix::Identity(n, n);
  Matrix B = (mu - lambda) * Matrix::Identity(n, n);
  Vector b = L.transpose() * c;
  return GaveProblem(std::move(A), std::move(B), std::move(b));
}

GaveProblem generate_ridge(int m, int n, double lambda, double mu,
                           std::uint64_t seed) {
  RngStream rng(seed);
  Matrix L(m, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < m; ++i) L(i, j) = rng.uniform(-5.0, 5.0);
  Vector c(m);
  for (Eigen::Index i = 0; i < m; ++i) c(i) = rng.uniform(-5.0, 5.0);
  return make_ridge_problem(L, c, lambda, mu);
}

}  // namespace gave
