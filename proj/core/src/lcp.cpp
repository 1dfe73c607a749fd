#include "gave/lcp.hpp"

#include <Eigen/Dense>

#include "gave/linalg.hpp"

namespace gave {

namespace {

void require_square_lcp(const LcpProblem& lcp) {
  if (lcp.Q.rows() != lcp.Q.cols()) {
    throw std::invalid_argument("LCP matrix Q must be square");
  }
  if (lcp.q.size() != lcp.Q.rows()) {
    throw std::invalid_argument("LCP vector q has wrong length");
  }
}

void require_standard_ave(const GaveProblem& problem, const char* who) {
  if (problem.m() != problem.n()) {
    throw PreconditionError(std::string(who) + " requires a square AVE (m = n)");
  }
  if (problem.B() != Matrix::Identity(problem.n(), problem.n())) {
    throw PreconditionError(std::string(who) + " requires the standard AVE (B = I)");
  }
}

bool numerically_nonsingular(const Matrix& M) {
  Vector s = singular_values(M);
  return s(s.size() - 1) > 1e-12 * std::max(s(0), 1.0);
}

}  // namespace

LcpSolution verify_lcp(const LcpProblem& lcp, const Vector& w, const Vector& z,
                       double tol) {
  require_square_lcp(lcp);
  if (w.size() != lcp.q.size() || z.size() != lcp.q.size()) {
    throw std::invalid_argument("verify_lcp: w/z have wrong length");
  }
  LcpSolution sol;
  sol.w = w;
  sol.z = z;
  const double comp = std::abs(w.dot(z));
  const double neg_w = w.cwiseMin(0.0).cwiseAbs().maxCoeff();
  const double neg_z = z.cwiseMin(0.0).cwiseAbs().maxCoeff();
  const double eq = (w - lcp.Q * z - lcp.q).cwiseAbs().maxCoeff();
  sol.comp_residual = std::max({comp, neg_w, neg_z, eq});
  sol.valid = sol.comp_residual <= tol;
  return sol;
}

std::pair<Vector, Vector> LcpToAveReduction::back_map(const Vector& x) const {
  Vector abs_x = x.cwiseAbs();
  return {(abs_x + x) / scale, abs_x - x};
}

LcpToAveReduction lcp_to_ave(const LcpProblem& lcp) {
  require_square_lcp(lcp);
  const auto l = lcp.Q.rows();
  double scale = 1.0;
  Matrix Qs = lcp.Q;
  Vector qs = lcp.q;
  Matrix QmI = Qs - Matrix::Identity(l, l);
  if (!numerically_nonsingular(QmI)) {
    scale = 1.0 / (2.0 * spectral_norm(lcp.Q));
    Qs *= scale;
    qs *= scale;
    QmI = Qs - Matrix::Identity(l, l);
    if (!numerically_nonsingular(QmI)) {
      throw PreconditionError(
          "lcp_to_ave: Q - I is singular even after rescaling by 1/(2||Q||_2)");
    }
  }
  Eigen::PartialPivLU<Matrix> lu(QmI);
  Matrix A = lu.solve(Matrix(Matrix::Identity(l, l) + Qs));
  Vector b = lu.solve(qs);
  return LcpToAveReduction{
      GaveProblem(std::move(A), Matrix::Identity(l, l), std::move(b)), scale};
}

Vector AveToLcpReduction::recover_x(const Vector& w, const Vector& z) const {
  switch (reformulation) {
    case AveReformulation::I:
      return w - z;  // w := x^+, z := x^-
    case AveReformulation::II: {
      const Eigen::Index n = z.size() / 3;
      return z.head(n) - z.segment(n, n);
    }
    case AveReformulation::III: {
      const Eigen::Index n = z.size();
      Vector y(n), s(n);
      std::vector<bool> in_set(n, false);
      for (int i : selected) in_set[i] = true;
      for (Eigen::Index i = 0; i < n; ++i) {
        y(i) = in_set[i] ? w(i) : z(i);
        s(i) = in_set[i] ? z(i) : w(i);
      }
      return 0.5 * (y - s);
    }
  }
  throw std::logic_error("unreachable");
}

AveToLcpReduction ave_to_lcp_I(const GaveProblem& problem) {
  require_standard_ave(problem, "ave_to_lcp_I");
  const auto n = problem.n();
  Matrix AmI = problem.A() - Matrix::Identity(n, n);
  if (!numerically_nonsingular(AmI)) {
    throw PreconditionError(
        "ave_to_lcp_I: A - I is singular; use Reformulation II or III");
  }
  Eigen::PartialPivLU<Matrix> lu(AmI);
  AveToLcpReduction red;
  red.reformulation = AveReformulation::I;
  red.lcp.Q = lu.solve(Matrix(problem.A() + Matrix::Identity(n, n)));
  red.lcp.q = lu.solve(problem.b());
  return red;
}

AveToLcpReduction ave_to_lcp_II(const GaveProblem& problem) {
  require_standard_ave(problem, "ave_to_lcp_II");
  const auto n = problem.n();
  const Matrix I = Matrix::Identity(n, n);
  AveToLcpReduction red;
  red.reformulation = AveReformulation::II;
  red.lcp.Q = Matrix::Zero(3 * n, 3 * n);
  red.lcp.Q.block(0, 0, n, n) = -I;
  red.lcp.Q.block(0, n, n, n) = 2.0 * I;
  red.lcp.Q.block(n, 0, n, n) = problem.A();
  red.lcp.Q.block(n, n, n, n) = -problem.A() - I;
  red.lcp.Q.block(2 * n, 0, n, n) = -problem.A();
  red.lcp.Q.block(2 * n, n, n, n) = problem.A() + I;
  red.lcp.q = Vector::Zero(3 * n);
  red.lcp.q.segment(n, n) = -problem.b();
  red.lcp.q.segment(2 * n, n) = problem.b();
  return red;
}

AveToLcpReduction ave_to_lcp_III(const GaveProblem& problem) {
  require_standard_ave(problem, "ave_to_lcp_III");
  const auto n = problem.n();
  const Matrix I = Matrix::Identity(n, n);
  AveToLcpReduction red;
  red.reformulation = AveReformulation::III;
  red.selected = select_indices(Matrix(problem.A() + I), Matrix(I - problem.A()));
  Vector d = -Vector::Ones(n);
  for (int i : red.selected) d(i) = 1.0;
  Matrix ADmI = problem.A() * d.asDiagonal() - I;
  if (!numerically_nonsingular(ADmI)) {
    Vector s = singular_values(ADmI);
    throw std::runtime_error(
        "ave_to_lcp_III: AD - I numerically singular despite index selection "
        "(sigma_min/sigma_max = " + std::to_string(s(s.size() - 1) / s(0)) + ")");
  }
  Eigen::PartialPivLU<Matrix> lu(ADmI);
  red.lcp.Q = lu.solve(Matrix(problem.A() * d.asDiagonal() + I));
  red.lcp.q = 2.0 * lu.solve(problem.b());
  return red;
}

std::vector<int> select_indices(const Matrix& P, const Matrix& Q) {
  if (P.rows() != P.cols() || Q.rows() != Q.cols() || P.rows() != Q.rows()) {
    throw std::invalid_argument("select_indices: P and Q must be square and equal-sized");
  }
  const auto m = P.rows();
  auto rank_of = [&](const Matrix& M) {
    Vector s = singular_values(M);
    const double cut = 1e-10 * s(0);
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
      if (s(i) > cut) ++r;
    return r;
  };
  if (rank_of(Matrix(P + Q)) != m) {
    throw PreconditionError("select_indices requires rank(P + Q) = m");
  }

  std::vector<int> selected;
  Matrix accumulated(m, m);  // columns 0..k-1 hold the running set M
  Matrix test(m, m);
  for (Eigen::Index k = 0; k < m; ++k) {
    test.leftCols(k) = accumulated.leftCols(k);
    test.col(k) = P.col(k);
    for (Eigen::Index j = k + 1; j < m; ++j) test.col(j) = P.col(j) + Q.col(j);
    if (rank_of(test) == m) {
      selected.push_back(static_cast<int>(k));
      accumulated.col(k) = P.col(k);
    } else {
      accumulated.col(k) = Q.col(k);
    }
  }
  return selected;
}

std::vector<LcpSolution> enumerate_lcp(const LcpProblem& lcp, double tol) {
  require_square_lcp(lcp);
  const auto l = lcp.Q.rows();
  if (l > 12) {
    throw std::invalid_argument("enumerate_lcp is capped at l <= 12 (2^l bases)");
  }
  std::vector<LcpSolution> solutions;
  const double scale = std::max(1.0, lcp.q.cwiseAbs().maxCoeff());
  for (std::uint64_t mask = 0; mask < (1ULL << l); ++mask) {
    std::vector<int> basic;  // z_i basic (w_i = 0)
    for (Eigen::Index i = 0; i < l; ++i) {
      if ((mask >> i) & 1) basic.push_back(static_cast<int>(i));
    }
    Vector z = Vector::Zero(l);
    if (!basic.empty()) {
      Matrix Qbb(basic.size(), basic.size());
      Vector qb(basic.size());
      for (std::size_t r = 0; r < basic.size(); ++r) {
        qb(r) = -lcp.q(basic[r]);
        for (std::size_t c = 0; c < basic.size(); ++c)
          Qbb(r, c) = lcp.Q(basic[r], basic[c]);
      }
      Vector zb = Eigen::FullPivLU<Matrix>(Qbb).solve(qb);
      if ((Qbb * zb - qb).cwiseAbs().maxCoeff() > 1e-10 * scale) continue;
      for (std::size_t r = 0; r < basic.size(); ++r) z(basic[r]) = zb(r);
    }
    Vector w = lcp.Q * z + lcp.q;
    if ((z.array() < -tol).any() || (w.array() < -tol).any()) continue;
    // sign-feasible; force exact complementarity structure
    for (int i : basic) w(i) = 0.0;
    LcpSolution sol = verify_lcp(lcp, w, z, tol);
    if (!sol.valid) continue;
    bool duplicate = false;
    for (const auto& other : solutions) {
      if ((other.w - sol.w).cwiseAbs().maxCoeff() <= 1e-9 * scale &&
          (other.z - sol.z).cwiseAbs().maxCoeff() <= 1e-9 * scale) {
        duplicate = true;
        break;
      }
    }
    if (!duplicate) solutions.push_back(std::move(sol));
  }
  return solutions;
}

}  // namespace gave
