#include <doctest.h>

#include <gave/certify.hpp>
#include <gave/generators.hpp>
#include <gave/linalg.hpp>
#include <gave/nnls.hpp>

#include "test_util.hpp"

using namespace gave;

namespace {

// Worked certificate triple, m = n case.
void golden_square(Matrix& A, Matrix& B, Matrix& M) {
  A.resize(2, 2);
  B.resize(2, 2);
  M.resize(2, 2);
  A << -7, 11, 10, -2;
  B << -2, 2, 6, 0;
  M << 13, 2, 2, 11;
}

// Worked certificate triple, m < n case.
void golden_wide(Matrix& A, Matrix& B, Matrix& M) {
  A.resize(2, 3);
  B.resize(2, 3);
  M.resize(2, 2);
  A << 2, 2, 6, -3, -6, 8;
  B << 4, 1, 0, 3, -1, -4;
  M << 8, -1, -1, 8;
}

// Worked certificate triple, m > n case.
void golden_tall(Matrix& A, Matrix& B, Matrix& M) {
  A.resize(3, 2);
  B.resize(3, 2);
  M.resize(3, 3);
  A << -6, -9, 6, -4, 5, -2;
  B << -2, 6, 2, -4, -6, -5;
  M << 45, 13, 0, 13, 33, 24, 0, 24, 24;
}

}  // namespace

TEST_CASE("interval determinant check: hand examples") {
  SUBCASE("A = 3I, B = I holds with all vertex determinants in {4, 8, 16}") {
    Certificate c = check_interval_nonsingular(3 * Matrix::Identity(2, 2),
                                               Matrix::Identity(2, 2));
    CHECK(c.verdict == Verdict::Holds);
    REQUIRE(c.det_min_abs.has_value());
    CHECK(*c.det_min_abs == doctest::Approx(4.0));
  }
  SUBCASE("A = I, B = I fails at the vertex s = (-1, -1)") {
    Certificate c =
        check_interval_nonsingular(Matrix::Identity(2, 2), Matrix::Identity(2, 2));
    CHECK(c.verdict == Verdict::Fails);
    REQUIRE(c.witness_sign.has_value());
    Matrix V = Matrix::Identity(2, 2) +
               Matrix::Identity(2, 2) * c.witness_sign->asDiagonal();
    CHECK(std::abs(V.determinant()) <= 1e-12);
  }
  SUBCASE("the certified 2x2 golden pair is interval nonsingular") {
    Matrix A, B, M;
    golden_square(A, B, M);
    CHECK(check_interval_nonsingular(A, B).verdict == Verdict::Holds);
  }
  SUBCASE("m != n is definitionally Fails; n > 20 is Inconclusive") {
    CHECK(check_interval_nonsingular(Matrix::Identity(3, 2), Matrix::Zero(3, 2))
              .verdict == Verdict::Fails);
    CHECK(check_interval_nonsingular(Matrix::Identity(21, 21), Matrix::Zero(21, 21))
              .verdict == Verdict::Inconclusive);
  }
}

// Vertex reduction validity: random interior D never contradicts the verdict.
TEST_CASE("interval verdicts agree with random interior-D probing") {
  RngStream rng(42);
  int holds_seen = 0, fails_seen = 0;
  for (int inst = 0; inst < 12; ++inst) {
    Matrix A = test::random_matrix(4, 4, rng);
    Matrix B = (inst % 2 == 0 ? 0.15 : 1.0) * test::random_matrix(4, 4, rng);
    Certificate c = check_interval_nonsingular(A, B);
    if (c.verdict == Verdict::Holds) {
      ++holds_seen;
      const double ref_sign = A.determinant() > 0 ? 1.0 : -1.0;
      for (int probe = 0; probe < 10000; ++probe) {
        Vector d(4);
        for (int i = 0; i < 4; ++i) d(i) = rng.uniform(-1.0, 1.0);
        const double det = (A + B * d.asDiagonal()).determinant();
        CHECK(det * ref_sign > 0.0);
      }
    } else {
      ++fails_seen;
      REQUIRE(c.witness_sign.has_value());
      const double det_w =
          (A + B * c.witness_sign->asDiagonal()).determinant();
      const double det_0 = (A + B * Matrix::Identity(4, 4)).determinant();
      const bool singular = std::abs(det_w) <=
                            1e-10 * std::pow(spectral_norm(A) + spectral_norm(B), 4);
      CHECK((singular || det_w * det_0 < 0.0));
    }
  }
  CHECK(holds_seen > 0);
  CHECK(fails_seen > 0);
}

TEST_CASE("spectral certificate (m = n) implies the interval condition") {
  for (std::uint64_t seed : {1u, 2u, 3u, 4u}) {
    GeneratorSpec spec;
    spec.m = 5;
    spec.n = 5;
    spec.a_min = 2.0;
    spec.b_max = 1.0;
    spec.kappa_a = 3.0;
    spec.seed = seed;
    GaveProblem p = generate_spectral(spec);
    REQUIRE(check_sufficient_spectral(p.A(), p.B()).verdict == Verdict::Holds);
    CHECK(check_interval_nonsingular(p.A(), p.B()).verdict == Verdict::Holds);
  }
}

TEST_CASE("sign-vector solvability") {
  SUBCASE("a problem with a stored solution is found solvable with tiny residual") {
    GeneratorSpec spec;
    spec.m = 6;
    spec.n = 6;
    spec.seed = 77;
    GaveProblem p = generate_spectral(spec);
    Certificate c = check_sign_vector_solvable(p);
    REQUIRE(c.verdict == Verdict::Holds);
    REQUIRE(c.witness_x.has_value());
    CHECK(residual(p, *c.witness_x).rre <= 1e-12);
  }
  SUBCASE("B = 0 with b outside Range(A) is unsolvable") {
    RngStream rng(5);
    Matrix A = test::random_matrix(5, 3, rng);
    Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeFullU);
    Vector outside = svd.matrixU().col(4);  // orthogonal to Range(A)
    Vector b = A * test::random_vector(3, rng) + 2.0 * outside;
    GaveProblem p(A, Matrix::Zero(5, 3), b);
    CHECK(check_sign_vector_solvable(p).verdict == Verdict::Fails);
  }
  SUBCASE("overdetermined inconsistent toy: A=(1,0)^T, b=(0,1)^T") {
    Matrix A(2, 1), B(2, 1);
    A << 1, 0;
    B << 0, 0;
    Vector b(2);
    b << 0, 1;
    GaveProblem p(A, B, b);
    CHECK(check_sign_vector_solvable(p).verdict == Verdict::Fails);
  }
}

TEST_CASE("golden spectral constants are reproduced to four decimals") {
  Matrix A, B, M;
  SUBCASE("m = n") {
    golden_square(A, B, M);
    Certificate plain = check_sufficient_spectral(A, B);
    CHECK(plain.verdict == Verdict::Fails);
    CHECK(*plain.sigma_ell_ma == doctest::Approx(6.2658).epsilon(5e-5));
    CHECK(*plain.norm_mb == doctest::Approx(6.3592).epsilon(5e-5));
    Certificate with_m = check_sufficient_spectral(A, B, M);
    CHECK(with_m.verdict == Verdict::Holds);
    CHECK(*with_m.sigma_ell_ma == doctest::Approx(81.2427).epsilon(5e-5));
    CHECK(*with_m.norm_mb == doctest::Approx(63.592).epsilon(5e-4));
  }
  SUBCASE("m < n") {
    golden_wide(A, B, M);
    Certificate plain = check_sufficient_spectral(A, B);
    CHECK(plain.verdict == Verdict::Fails);
    CHECK(*plain.sigma_ell_ma == doctest::Approx(5.6807).epsilon(5e-5));
    CHECK(*plain.norm_mb == doctest::Approx(5.7780).epsilon(5e-5));
    Certificate with_m = check_sufficient_spectral(A, B, M);
    CHECK(with_m.verdict == Verdict::Holds);
    CHECK(*with_m.sigma_ell_ma == doctest::Approx(48.1674).epsilon(5e-5));
    CHECK(*with_m.norm_mb == doctest::Approx(41.0904).epsilon(5e-5));
  }
  SUBCASE("m > n") {
    golden_tall(A, B, M);
    Certificate with_m = check_sufficient_spectral(A, B, M);
    CHECK(with_m.verdict == Verdict::Holds);
    CHECK(*with_m.sigma_ell_ma == doctest::Approx(401.4896).epsilon(5e-5));
    CHECK(*with_m.norm_mb == doctest::Approx(360.9529).epsilon(5e-5));
  }
  SUBCASE("singular M is rejected") {
    golden_square(A, B, M);
    Matrix S = Matrix::Zero(2, 2);
    S(0, 0) = 1.0;
    CHECK_THROWS_AS(check_sufficient_spectral(A, B, S), PreconditionError);
  }
}

TEST_CASE("preconditioner search") {
  SUBCASE("immediate success when sigma_n(A) > ||B||_2 already") {
    GeneratorSpec spec;
    spec.m = 6;
    spec.n = 4;
    spec.a_min = 2.0;
    spec.b_max = 1.0;
    spec.seed = 6;
    GaveProblem p = generate_spectral(spec);
    Certificate c = find_preconditioner(p.A(), p.B(), 100);
    CHECK(c.verdict == Verdict::Holds);
    CHECK(*c.phi_value < 0.0);
  }
  SUBCASE("finds a certificate for all three golden pairs within budget") {
    Matrix A, B, M;
    for (int which = 0; which < 3; ++which) {
      if (which == 0) golden_square(A, B, M);
      if (which == 1) golden_wide(A, B, M);
      if (which == 2) golden_tall(A, B, M);
      Certificate c = find_preconditioner(A, B, 5000);
      INFO("pair ", which);
      REQUIRE(c.verdict == Verdict::Holds);
      // any valid certificate is accepted; cross-check it
      Certificate check = check_sufficient_spectral(A, B, c.preconditioner);
      CHECK(check.verdict == Verdict::Holds);
    }
  }
  SUBCASE("B = A admits no certificate: budget exhausts, grid agrees") {
    RngStream rng(7);
    Matrix A = test::random_matrix(2, 2, rng) + 3 * Matrix::Identity(2, 2);
    Certificate c = find_preconditioner(A, A, 300);
    CHECK(c.verdict == Verdict::Inconclusive);
    // dense grid over a compact slice of {M >= I}: phi never negative
    for (double a = 1.0; a <= 4.0; a += 0.25) {
      for (double b = 1.0; b <= 4.0; b += 0.25) {
        for (double cc = -1.5; cc <= 1.5; cc += 0.25) {
          Matrix M(2, 2);
          M << a, cc, cc, b;
          if (lambda_min_sym(M) < 1.0 - 1e-12) continue;
          CHECK(phi_objective(A, A, M) >= -1e-12);
        }
      }
    }
  }
}

TEST_CASE("row dominance") {
  Matrix A(1, 2), B(1, 2);
  A << 0, 0;
  B << 1, 1;
  Certificate c = check_row_dominance(A, B);
  CHECK(c.verdict == Verdict::Holds);
  CHECK(*c.witness_index == 0);

  A << 1, 0;  // |1| is not strictly below 1
  CHECK(check_row_dominance(A, B).verdict == Verdict::Fails);
}

TEST_CASE("row dominance implies only the zero solution (grid oracle, n = 3)") {
  Matrix A(2, 3), B(2, 3);
  A << 0.3, -0.4, 0.2, 5, 5, 5;
  B << 0.8, 0.9, 0.5, 0, 0, 0;
  Certificate c = check_row_dominance(A, B);
  REQUIRE(c.verdict == Verdict::Holds);
  GaveProblem p(A, B, Vector::Zero(2));
  Vector x(3);
  for (double x0 = -2.0; x0 <= 2.0; x0 += 0.05) {
    for (double x1 = -2.0; x1 <= 2.0; x1 += 0.05) {
      for (double x2 = -2.0; x2 <= 2.0; x2 += 0.05) {
        x << x0, x1, x2;
        if (x.norm() < 1e-9) continue;
        CHECK(eval_F(p, x).norm() >= 1e-6);
      }
    }
  }
}

TEST_CASE("error-bound constants") {
  SUBCASE("B = 0 with M = I reduces to the least-squares constant sigma_n(A)") {
    RngStream rng(8);
    Matrix A = test::random_matrix(7, 4, rng);
    Certificate c =
        error_bound_constant(A, Matrix::Zero(7, 4), Matrix::Identity(7, 7));
    CHECK(*c.kappa_bound == doctest::Approx(sigma_min(A)).epsilon(1e-10));
  }
  SUBCASE("spectral generator with a_min = 2, b_max = 1 gives kappa = 1") {
    GeneratorSpec spec;
    spec.m = 10;
    spec.n = 10;
    spec.seed = 9;
    GaveProblem p = generate_spectral(spec);
    Certificate c =
        error_bound_constant(p.A(), p.B(), Matrix::Identity(10, 10));
    CHECK(*c.kappa_bound == doctest::Approx(1.0).epsilon(1e-7));
  }
  SUBCASE("golden tall pair: kappa = 401.4896 - 360.9529") {
    Matrix A, B, M;
    golden_tall(A, B, M);
    Certificate c = error_bound_constant(A, B, M);
    CHECK(*c.kappa_bound == doctest::Approx(40.5367).epsilon(2e-5));
  }
  SUBCASE("m < n is rejected") {
    Matrix A, B, M;
    golden_wide(A, B, M);
    CHECK_THROWS_AS(error_bound_constant(A, B, M), PreconditionError);
  }
}

TEST_CASE("error-bound inequality holds on random points") {
  GeneratorSpec spec;
  spec.m = 9;
  spec.n = 6;
  spec.a_min = 2.0;
  spec.b_max = 1.0;
  spec.kappa_a = 2.0;
  spec.seed = 10;
  GaveProblem p = generate_spectral(spec);
  Matrix M = Matrix::Identity(9, 9);
  Certificate c = error_bound_constant(p.A(), p.B(), M);
  const double kappa = *c.kappa_bound;
  const Vector& xs = *p.known_solution();
  RngStream rng(11);
  for (int i = 0; i < 1000; ++i) {
    Vector x = xs + test::random_vector(6, rng) * std::pow(10.0, rng.uniform(-3, 2));
    const double lhs = kappa * (x - xs).norm();
    const double rhs = (M * (eval_F(p, x) - p.b())).norm();
    CHECK(lhs <= rhs + 1e-8);
  }
}

TEST_CASE("phi objective is convex along random segments in {M >= I}") {
  RngStream rng(12);
  Matrix A = test::random_matrix(5, 3, rng);
  Matrix B = test::random_matrix(5, 3, rng);
  for (int round = 0; round < 20; ++round) {
    Matrix G1 = test::random_matrix(5, 5, rng);
    Matrix G2 = test::random_matrix(5, 5, rng);
    Matrix M1 = Matrix::Identity(5, 5) + G1 * G1.transpose();
    Matrix M2 = Matrix::Identity(5, 5) + G2 * G2.transpose();
    const double p1 = phi_objective(A, B, M1);
    const double p2 = phi_objective(A, B, M2);
    for (double theta : {0.25, 0.5, 0.75}) {
      const double mid = phi_objective(A, B, Matrix(theta * M1 + (1 - theta) * M2));
      CHECK(mid <= theta * p1 + (1 - theta) * p2 + 1e-10);
    }
  }
}

TEST_CASE("certificates are scale invariant: tau M certifies whenever M does") {
  Matrix A, B, M;
  golden_square(A, B, M);
  REQUIRE(check_sufficient_spectral(A, B, M).verdict == Verdict::Holds);
  for (double tau : {-3.0, 0.5, 10.0}) {
    CHECK(check_sufficient_spectral(A, B, Matrix(tau * M)).verdict == Verdict::Holds);
  }
}

TEST_CASE("empirical kappa estimates") {
  SUBCASE("B = 0, A = I: the ratio is identically one") {
    Matrix I4 = Matrix::Identity(4, 4);
    Vector xs(4);
    xs << 1, -2, 0.5, 3;
    GaveProblem p(I4, Matrix::Zero(4, 4), xs, xs);
    RngStream rng(13);
    CHECK(estimate_kappa_empirical(p, 200, rng) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("B = 0: estimate is bounded below by sigma_n(A)") {
    RngStream rng(14);
    Matrix A = test::random_matrix(8, 5, rng);
    Vector xs = test::random_vector(5, rng);
    GaveProblem p(A, Matrix::Zero(8, 5), A * xs, xs);
    RngStream erng(15);
    CHECK(estimate_kappa_empirical(p, 400, erng) >= sigma_min(A) - 1e-9);
  }
  SUBCASE("certified instance: estimate dominates the constructive bound") {
    GeneratorSpec spec;
    spec.m = 8;
    spec.n = 8;
    spec.seed = 16;
    GaveProblem p = generate_spectral(spec);
    Certificate c = error_bound_constant(p.A(), p.B(), Matrix::Identity(8, 8));
    RngStream rng(17);
    CHECK(estimate_kappa_empirical(p, 400, rng) >= *c.kappa_bound - 1e-9);
  }
  SUBCASE("requires a known solution") {
    GaveProblem p(Matrix::Identity(2, 2), Matrix::Zero(2, 2), Vector::Ones(2));
    RngStream rng(18);
    CHECK_THROWS_AS(estimate_kappa_empirical(p, 100, rng), PreconditionError);
  }
}

TEST_CASE("nnls solves small systems exactly") {
  SUBCASE("identity: solution clamps negative entries") {
    Matrix I3 = Matrix::Identity(3, 3);
    Vector b(3);
    b << 2, -1, 0.5;
    NnlsResult r = nnls(I3, b);
    CHECK(r.x(0) == doctest::Approx(2.0));
    CHECK(r.x(1) == doctest::Approx(0.0));
    CHECK(r.x(2) == doctest::Approx(0.5));
    CHECK(r.residual_norm == doctest::Approx(1.0));
  }
  SUBCASE("feasible system is met exactly") {
    RngStream rng(19);
    Matrix A = test::random_matrix(6, 4, rng);
    Vector y(4);
    y << 0.5, 0.0, 2.0, 1.0;
    NnlsResult r = nnls(A, A * y);
    CHECK(r.residual_norm <= 1e-10);
    CHECK((r.x.array() >= -1e-12).all());
  }
}
