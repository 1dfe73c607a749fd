#include "gave/certify.hpp"

#include <Eigen/Dense>
#include <cmath>

#include <json.hpp>

#include "gave/linalg.hpp"
#include "gave/nnls.hpp"

namespace gave {

namespace {

constexpr int kEnumCap = 20;  // 2^20 vertex systems; beyond that: Inconclusive

Vector sign_vector(std::uint64_t v, int n) {
  Vector s(n);
  for (int i = 0; i < n; ++i) s(i) = (v >> i) & 1 ? -1.0 : 1.0;
  return s;
}

struct DetSign {
  double sign = 0.0;     // -1, 0, +1
  double log_abs = 0.0;  // valid when sign != 0
};

// Sign and log-magnitude of det via LU with partial pivoting. A pivot of
// exactly zero gives sign 0.
DetSign det_sign_log(const Matrix& M) {
  Eigen::PartialPivLU<Matrix> lu(M);
  DetSign out;
  double sign = static_cast<double>(lu.permutationP().determinant());
  double log_abs = 0.0;
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    const double d = lu.matrixLU()(i, i);
    if (d == 0.0) return out;  // sign 0
    sign *= d > 0 ? 1.0 : -1.0;
    log_abs += std::log(std::abs(d));
  }
  out.sign = sign;
  out.log_abs = log_abs;
  return out;
}

}  // namespace

const char* to_string(CertificateKind kind) {
  switch (kind) {
    case CertificateKind::UniqueSolvableIntervalDet: return "unique_solvable_interval_det";
    case CertificateKind::SolvableSignVector: return "solvable_sign_vector";
    case CertificateKind::SufficientSpectral: return "sufficient_spectral";
    case CertificateKind::RowDominance: return "row_dominance";
    case CertificateKind::ErrorBound: return "error_bound";
  }
  return "?";
}

const char* to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::Holds: return "holds";
    case Verdict::Fails: return "fails";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

std::string certificate_to_json(const Certificate& cert) {
  nlohmann::json j;
  j["kind"] = to_string(cert.kind);
  j["verdict"] = to_string(cert.verdict);
  if (cert.witness_sign) {
    j["witness_sign"] = std::vector<double>(
        cert.witness_sign->data(), cert.witness_sign->data() + cert.witness_sign->size());
  }
  if (cert.preconditioner) {
    const Matrix& M = *cert.preconditioner;
    nlohmann::json arr = nlohmann::json::array();
    for (Eigen::Index i = 0; i < M.rows(); ++i)
      for (Eigen::Index jj = 0; jj < M.cols(); ++jj) arr.push_back(M(i, jj));
    j["M"] = arr;
    j["M_rows"] = M.rows();
  }
  if (cert.witness_index) j["witness_index"] = *cert.witness_index;
  if (cert.witness_x) {
    j["witness_x"] = std::vector<double>(cert.witness_x->data(),
                                         cert.witness_x->data() + cert.witness_x->size());
  }
  if (cert.sigma_ell_ma) j["sigma_ell_MA"] = *cert.sigma_ell_ma;
  if (cert.norm_mb) j["norm_MB"] = *cert.norm_mb;
  if (cert.kappa_bound) j["kappa_bound"] = *cert.kappa_bound;
  if (cert.phi_value) j["phi"] = *cert.phi_value;
  if (cert.det_min_abs) j["det_min_abs"] = *cert.det_min_abs;
  if (!cert.detail.empty()) j["detail"] = cert.detail;
  return j.dump(2) + "\n";
}

Certificate check_interval_nonsingular(const Matrix& A, const Matrix& B) {
  Certificate cert;
  cert.kind = CertificateKind::UniqueSolvableIntervalDet;
  if (A.rows() != B.rows() || A.cols() != B.cols()) {
    throw std::invalid_argument("check_interval_nonsingular: A and B dimensions differ");
  }
  const auto m = A.rows();
  const auto n = A.cols();
  if (m != n) {
    cert.verdict = Verdict::Fails;
    cert.detail = "m != n: no square-free unique solvability for every b";
    return cert;
  }
  if (n > kEnumCap) {
    cert.verdict = Verdict::Inconclusive;
    cert.detail = "n > " + std::to_string(kEnumCap) +
                  ": 2^n vertex determinants not enumerated; use "
                  "check_sufficient_spectral / find_preconditioner instead";
    return cert;
  }

  const double scale = spectral_norm(A) + spectral_norm(B);
  if (scale == 0.0) {
    cert.verdict = Verdict::Fails;
    cert.witness_sign = sign_vector(0, static_cast<int>(n));
    cert.detail = "A and B are zero";
    return cert;
  }
  // |det| below 1e-12 * (||A||_2 + ||B||_2)^n counts as singular.
  const double log_zero = std::log(1e-12) + static_cast<double>(n) * std::log(scale);

  double ref_sign = 0.0;
  double min_log = std::numeric_limits<double>::infinity();
  std::uint64_t min_vertex = 0;
  const std::uint64_t count = 1ULL << n;
  for (std::uint64_t v = 0; v < count; ++v) {
    Vector s = sign_vector(v, static_cast<int>(n));
    DetSign d = det_sign_log(Matrix(A + B * s.asDiagonal()));
    if (d.sign == 0.0 || d.log_abs <= log_zero) {
      cert.verdict = Verdict::Fails;
      cert.witness_sign = s;
      cert.detail = "vertex determinant numerically zero";
      return cert;
    }
    if (v == 0) {
      ref_sign = d.sign;
    } else if (d.sign != ref_sign) {
      cert.verdict = Verdict::Fails;
      cert.witness_sign = s;
      cert.detail = "vertex determinant changes sign against the all-ones vertex";
      return cert;
    }
    if (d.log_abs < min_log) {
      min_log = d.log_abs;
      min_vertex = v;
    }
  }
  cert.verdict = Verdict::Holds;
  cert.witness_sign = sign_vector(min_vertex, static_cast<int>(n));
  cert.det_min_abs = std::exp(min_log);
  cert.detail = std::string("all vertex determinants share sign ") +
                (ref_sign > 0 ? "+" : "-");
  return cert;
}

Certificate check_sign_vector_solvable(const GaveProblem& problem) {
  Certificate cert;
  cert.kind = CertificateKind::SolvableSignVector;
  const auto n = problem.n();
  if (n > kEnumCap) {
    cert.verdict = Verdict::Inconclusive;
    cert.detail = "n > " + std::to_string(kEnumCap) + ": 2^n feasibility systems not enumerated";
    return cert;
  }
  const double tol = 1e-8 * std::max(1.0, problem.b().norm());
  const std::uint64_t count = 1ULL << n;
  for (std::uint64_t v = 0; v < count; ++v) {
    Vector s = sign_vector(v, static_cast<int>(n));
    // (A - B D_s) D_s = A D_s - B since D_s^2 = I.
    Matrix W = problem.A() * s.asDiagonal() - problem.B();
    NnlsResult r = nnls(W, problem.b());
    if (r.residual_norm <= tol) {
      cert.verdict = Verdict::Holds;
      cert.witness_sign = s;
      cert.witness_x = Vector(s.asDiagonal() * r.x);
      cert.detail = "feasible sign vector found (nnls residual " +
                    std::to_string(r.residual_norm) + ")";
      return cert;
    }
  }
  cert.verdict = Verdict::Fails;
  cert.detail = "no sign vector admits (A D_s - B) y = b with y >= 0";
  return cert;
}

Certificate check_sufficient_spectral(const Matrix& A, const Matrix& B,
                                      const std::optional<Matrix>& M_opt) {
  if (A.rows() != B.rows() || A.cols() != B.cols()) {
    throw std::invalid_argument("check_sufficient_spectral: A and B dimensions differ");
  }
  const auto m = A.rows();
  Matrix M = M_opt ? *M_opt : Matrix::Identity(m, m);
  if (M.rows() != m || M.cols() != m) {
    throw std::invalid_argument("M must be " + std::to_string(m) + "x" + std::to_string(m));
  }
  Vector sm = singular_values(M);
  if (!(sm(sm.size() - 1) > 1e-12 * sm(0))) {
    throw PreconditionError("M is numerically singular (sigma_min/sigma_max = " +
                            std::to_string(sm(sm.size() - 1) / std::max(sm(0), 1e-300)) + ")");
  }
  Certificate cert;
  cert.kind = CertificateKind::SufficientSpectral;
  cert.preconditioner = M;
  cert.sigma_ell_ma = sigma_min(Matrix(M * A));  // sigma_l, l = min(m, n)
  cert.norm_mb = spectral_norm(Matrix(M * B));
  cert.verdict = *cert.sigma_ell_ma > *cert.norm_mb ? Verdict::Holds : Verdict::Fails;
  return cert;
}

double phi_objective(const Matrix& A, const Matrix& B, const Matrix& M) {
  const double top = lambda_max_sym(Matrix(B.transpose() * M * B));
  double bottom;
  if (A.rows() >= A.cols()) {
    bottom = lambda_min_sym(Matrix(A.transpose() * M * A));
  } else {
    Matrix g_half = sym_sqrt(Matrix(A * A.transpose()));
    bottom = lambda_min_sym(Matrix(g_half * M * g_half));
  }
  return top - bottom;
}

Certificate find_preconditioner(const Matrix& A, const Matrix& B, int iters,
                                double tol) {
  if (A.rows() != B.rows() || A.cols() != B.cols()) {
    throw std::invalid_argument("find_preconditioner: A and B dimensions differ");
  }
  const auto m = A.rows();
  const bool tall = A.rows() >= A.cols();
  Matrix g_half;  // (A A^T)^{1/2}, used when m < n
  if (!tall) g_half = sym_sqrt(Matrix(A * A.transpose()));

  auto phi_and_grad = [&](const Matrix& M, Matrix& grad) {
    Eigen::SelfAdjointEigenSolver<Matrix> top(Matrix(B.transpose() * M * B));
    const Eigen::Index nb = top.eigenvalues().size();
    Vector u = top.eigenvectors().col(nb - 1);
    Vector bu = B * u;
    double value = top.eigenvalues()(nb - 1);
    if (tall) {
      Eigen::SelfAdjointEigenSolver<Matrix> bot(Matrix(A.transpose() * M * A));
      Vector av = A * bot.eigenvectors().col(0);
      grad = bu * bu.transpose() - av * av.transpose();
      value -= bot.eigenvalues()(0);
    } else {
      Eigen::SelfAdjointEigenSolver<Matrix> bot(Matrix(g_half * M * g_half));
      Vector gw = g_half * bot.eigenvectors().col(0);
      grad = bu * bu.transpose() - gw * gw.transpose();
      value -= bot.eigenvalues()(0);
    }
    return value;
  };

  auto project = [](Matrix M) {
    M = 0.5 * (M + M.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> es(M);
    Vector lam = es.eigenvalues().cwiseMax(1.0);  // {M : M >= I}
    return Matrix(es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose());
  };

  auto make_holds = [&](const Matrix& M, double phi) {
    Certificate cert;
    cert.kind = CertificateKind::SufficientSpectral;
    cert.verdict = Verdict::Holds;
    Matrix m_cert = sym_sqrt(M);  // sigma_l((M)^{1/2} A) > ||(M)^{1/2} B||_2
    cert.sigma_ell_ma = sigma_min(Matrix(m_cert * A));
    cert.norm_mb = spectral_norm(Matrix(m_cert * B));
    cert.preconditioner = std::move(m_cert);
    cert.phi_value = phi;
    return cert;
  };

  const double na = spectral_norm(A);
  const double nb = spectral_norm(B);
  const double c = 1.0 / (na * na + nb * nb);

  Matrix M = Matrix::Identity(m, m);
  Matrix grad(m, m);
  double phi = phi_and_grad(M, grad);
  if (phi < -tol) return make_holds(M, phi);

  double best_phi = phi;
  Matrix best_m = M;
  for (int k = 1; k <= iters; ++k) {
    M = project(M - (c / std::sqrt(static_cast<double>(k))) * grad);
    phi = phi_and_grad(M, grad);
    if (phi < best_phi) {
      best_phi = phi;
      best_m = M;
    }
    if (phi < -tol) return make_holds(M, phi);
  }

  Certificate cert;
  cert.kind = CertificateKind::SufficientSpectral;
  cert.verdict = Verdict::Inconclusive;
  cert.phi_value = best_phi;
  cert.preconditioner = sym_sqrt(best_m);
  cert.detail = "subgradient budget exhausted with best phi = " +
                std::to_string(best_phi) +
                "; first-order search cannot certify infeasibility";
  return cert;
}

Certificate check_row_dominance(const Matrix& A, const Matrix& B) {
  if (A.rows() != B.rows() || A.cols() != B.cols()) {
    throw std::invalid_argument("check_row_dominance: A and B dimensions differ");
  }
  Certificate cert;
  cert.kind = CertificateKind::RowDominance;
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    bool dominated = true;
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
      if (!(std::abs(A(i, j)) < B(i, j))) {
        dominated = false;
        break;
      }
    }
    if (dominated) {
      cert.verdict = Verdict::Holds;
      cert.witness_index = static_cast<int>(i);
      cert.detail = "zero is the unique solution of Ax - B|x| = 0";
      return cert;
    }
  }
  cert.verdict = Verdict::Fails;
  return cert;
}

Certificate error_bound_constant(const Matrix& A, const Matrix& B,
                                 const Matrix& M) {
  if (A.rows() < A.cols()) {
    throw PreconditionError("error_bound_constant requires m >= n");
  }
  Certificate spectral = check_sufficient_spectral(A, B, M);
  if (spectral.verdict != Verdict::Holds) {
    throw PreconditionError(
        "error_bound_constant requires sigma_n(MA) > ||MB||_2, got " +
        std::to_string(*spectral.sigma_ell_ma) + " vs " +
        std::to_string(*spectral.norm_mb));
  }
  Certificate cert;
  cert.kind = CertificateKind::ErrorBound;
  cert.verdict = Verdict::Holds;
  cert.preconditioner = M;
  cert.sigma_ell_ma = spectral.sigma_ell_ma;
  cert.norm_mb = spectral.norm_mb;
  cert.kappa_bound = *spectral.sigma_ell_ma - *spectral.norm_mb;
  cert.detail = "kappa ||x - x*||_2 <= ||Ax - B|x| - b||_{M^T M}";
  return cert;
}

double estimate_kappa_empirical(const GaveProblem& problem, int samples,
                                RngStream& rng) {
  if (!problem.known_solution()) {
    throw PreconditionError("estimate_kappa_empirical requires a known solution");
  }
  if (samples < 4) throw std::invalid_argument("need at least 4 samples");
  const Vector& xs = *problem.known_solution();
  double scale = xs.norm();
  if (scale == 0.0) scale = 1.0;
  const double radii[4] = {1e-3 * scale, 1e-1 * scale, scale, 10.0 * scale};

  double best = std::numeric_limits<double>::infinity();
  const int per = samples / 4;
  for (int ri = 0; ri < 4; ++ri) {
    const int count = ri == 3 ? samples - 3 * per : per;
    for (int s = 0; s < count; ++s) {
      Vector g(problem.n());
      for (Eigen::Index i = 0; i < g.size(); ++i) g(i) = rng.normal();
      g *= radii[ri] / g.norm();
      Vector x = xs + g;
      const double ratio = (eval_F(problem, x) - problem.b()).norm() / radii[ri];
      best = std::min(best, ratio);
    }
  }
  return best;
}

}  // namespace gave
