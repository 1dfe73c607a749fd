#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <stdexcept>

namespace gave {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Raised when a method's mathematical precondition fails (rank, shape,
/// spectral gap, ...). Distinct from std::invalid_argument so callers can
/// map it onto a dedicated exit code.
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A generalized absolute value equation  A x - B |x| = b  with
/// A, B in R^{m x n}, b in R^m and |x| taken elementwise.
///
/// Instances are immutable after construction and safe to share across
/// threads. If a reference solution is attached it must actually solve the
/// equation (checked at construction).
class GaveProblem {
 public:
  GaveProblem(Matrix A, Matrix B, Vector b,
              std::optional<Vector> known_solution = std::nullopt,
              std::optional<std::uint64_t> seed = std::nullopt);

  const Matrix& A() const { return A_; }
  const Matrix& B() const { return B_; }
  const Vector& b() const { return b_; }
  Eigen::Index m() const { return A_.rows(); }
  Eigen::Index n() const { return A_.cols(); }

  const std::optional<Vector>& known_solution() const { return known_solution_; }
  const std::optional<std::uint64_t>& seed() const { return seed_; }

 private:
  Matrix A_;
  Matrix B_;
  Vector b_;
  std::optional<Vector> known_solution_;
  std::optional<std::uint64_t> seed_;
};

struct ResidualMetrics {
  double rre = 0.0;                 // ||Ax - B|x| - b||^2 / ||b||^2
  std::optional<double> rse;        // ||x - x*||^2 / ||x*||^2, if x* is known
};

/// F_{A,B}(x) = A x - B |x|.
Vector eval_F(const GaveProblem& problem, const Vector& x);

/// Relative residual error, plus relative solution error when a reference
/// solution is stored. When ||b|| = 0 (resp. ||x*|| = 0) the relative error
/// degenerates, so the absolute squared residual (resp. error) is reported
/// instead.
ResidualMetrics residual(const GaveProblem& problem, const Vector& x);

}  // namespace gave
