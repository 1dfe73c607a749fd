#include "gave/problem.hpp"

#include <string>

namespace gave {

namespace {

void check_length(const char* what, Eigen::Index expected, Eigen::Index actual) {
  if (expected != actual) {
    throw std::invalid_argument(std::string(what) + ": expected length " +
                                std::to_string(expected) + ", got " +
                                std::to_string(actual));
  }
}

}  // namespace

GaveProblem::GaveProblem(Matrix A, Matrix B, Vector b,
                         std::optional<Vector> known_solution,
                         std::optional<std::uint64_t> seed)
    : A_(std::move(A)),
      B_(std::move(B)),
      b_(std::move(b)),
      known_solution_(std::move(known_solution)),
      seed_(seed) {
  if (A_.rows() != B_.rows() || A_.cols() != B_.cols()) {
    throw std::invalid_argument(
        "A and B must share dimensions: A is " + std::to_string(A_.rows()) + "x" +
        std::to_string(A_.cols()) + ", B is " + std::to_string(B_.rows()) + "x" +
        std::to_string(B_.cols()));
  }
  check_length("b", A_.rows(), b_.size());
  if (known_solution_) {
    check_length("known_solution", A_.cols(), known_solution_->size());
    const Vector& x = *known_solution_;
    double res = (A_ * x - B_ * x.cwiseAbs() - b_).norm();
    if (res > 1e-10 * std::max(1.0, b_.norm())) {
      throw std::invalid_argument(
          "known_solution does not solve the equation: residual " +
          std::to_string(res));
    }
  }
}

Vector eval_F(const GaveProblem& problem, const Vector& x) {
  check_length("x", problem.n(), x.size());
  return problem.A() * x - problem.B() * x.cwiseAbs();
}

ResidualMetrics residual(const GaveProblem& problem, const Vector& x) {
  ResidualMetrics out;
  const double res_sq = (eval_F(problem, x) - problem.b()).squaredNorm();
  const double b_sq = problem.b().squaredNorm();
  out.rre = b_sq > 0.0 ? res_sq / b_sq : res_sq;
  if (problem.known_solution()) {
    const Vector& xs = *problem.known_solution();
    const double err_sq = (x - xs).squaredNorm();
    const double xs_sq = xs.squaredNorm();
    out.rse = xs_sq > 0.0 ? err_sq / xs_sq : err_sq;
  }
  return out;
}

}  // namespace gave
