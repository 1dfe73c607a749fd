#include <doctest.h>

#include <gave/baselines.hpp>
#include <gave/generators.hpp>
#include <gave/lcp.hpp>
#include <gave/linalg.hpp>

#include "test_util.hpp"

using namespace gave;

namespace {

LcpProblem random_pd_lcp(int l, RngStream& rng) {
  Matrix S = test::random_matrix(l, l, rng);
  return LcpProblem{S.transpose() * S + Matrix::Identity(l, l),
                    test::random_vector(l, rng)};
}

Vector solve_standard_ave(const GaveProblem& p) {
  StopRule stop{StopMetric::Rre, 1e-24, 200};
  return gnm_solve(p, stop, Vector::Zero(p.n())).final_x;
}

}  // namespace

TEST_CASE("verify_lcp residuals") {
  LcpProblem lcp{Matrix::Identity(2, 2), Vector::Ones(2)};
  SUBCASE("w = q >= 0, z = 0 is exact") {
    LcpSolution s = verify_lcp(lcp, lcp.q, Vector::Zero(2));
    CHECK(s.comp_residual == 0.0);
    CHECK(s.valid);
  }
  SUBCASE("hand pair with Q = I, q = (1, -1)") {
    LcpProblem l2{Matrix::Identity(2, 2), (Vector(2) << 1, -1).finished()};
    Vector w(2), z(2);
    w << 1, 0;
    z << 0, 1;
    LcpSolution s = verify_lcp(l2, w, z);
    CHECK(s.comp_residual == 0.0);
    CHECK(s.valid);
  }
  SUBCASE("a slightly negative entry invalidates at 1e-8") {
    Vector w = lcp.q, z = Vector::Zero(2);
    z(0) = -1e-3;
    LcpSolution s = verify_lcp(lcp, w, z);
    CHECK(s.comp_residual >= 1e-3);
    CHECK_FALSE(s.valid);
  }
}

TEST_CASE("enumeration oracle on hand instances") {
  SUBCASE("Q = I, q = e: unique solution w = e, z = 0") {
    LcpProblem lcp{Matrix::Identity(3, 3), Vector::Ones(3)};
    auto sols = enumerate_lcp(lcp);
    REQUIRE(sols.size() == 1);
    CHECK((sols[0].w - Vector::Ones(3)).norm() <= 1e-12);
    CHECK(sols[0].z.norm() <= 1e-12);
  }
  SUBCASE("Q = -I, q = -e: infeasible, empty set") {
    LcpProblem lcp{-Matrix::Identity(2, 2), -Vector::Ones(2)};
    CHECK(enumerate_lcp(lcp).empty());
  }
  SUBCASE("positive definite Q has exactly one solution") {
    RngStream rng(1);
    for (int round = 0; round < 10; ++round) {
      LcpProblem lcp = random_pd_lcp(2, rng);
      CHECK(enumerate_lcp(lcp).size() == 1);
    }
  }
  SUBCASE("size cap") {
    LcpProblem big{Matrix::Identity(13, 13), Vector::Ones(13)};
    CHECK_THROWS_AS(enumerate_lcp(big), std::invalid_argument);
  }
}

TEST_CASE("lcp_to_ave: hand reductions and round trips") {
  SUBCASE("Q = 0, q = e reduces to -x - |x| = -e with solution x = e/2") {
    LcpProblem lcp{Matrix::Zero(2, 2), Vector::Ones(2)};
    LcpToAveReduction red = lcp_to_ave(lcp);
    CHECK(red.scale == 1.0);
    CHECK((red.gave.A() + Matrix::Identity(2, 2)).norm() <= 1e-14);
    CHECK((red.gave.b() + Vector::Ones(2)).norm() <= 1e-14);
    Vector x = Vector::Constant(2, 0.5);
    CHECK(residual(red.gave, x).rre <= 1e-28);
    auto [w, z] = red.back_map(x);
    // oracle: the unique LCP solution is w = q, z = 0
    LcpSolution check = verify_lcp(lcp, w, z, 1e-10);
    CHECK(check.valid);
    CHECK((w - Vector::Ones(2)).norm() <= 1e-12);
    CHECK(z.norm() <= 1e-12);
  }
  SUBCASE("scalar Q = 3, q = -1: AVE 2x - |x| = -1/2, x = -1/6") {
    LcpProblem lcp{Matrix::Constant(1, 1, 3.0), Vector::Constant(1, -1.0)};
    LcpToAveReduction red = lcp_to_ave(lcp);
    CHECK(red.gave.A()(0, 0) == doctest::Approx(2.0));
    CHECK(red.gave.b()(0) == doctest::Approx(-0.5));
    Vector x = Vector::Constant(1, -1.0 / 6.0);
    CHECK(residual(red.gave, x).rre <= 1e-20);
    auto [w, z] = red.back_map(x);
    CHECK(verify_lcp(lcp, w, z, 1e-10).valid);
    auto sols = enumerate_lcp(lcp);
    REQUIRE(sols.size() == 1);
    CHECK((w - sols[0].w).norm() <= 1e-10);
    CHECK((z - sols[0].z).norm() <= 1e-10);
  }
  SUBCASE("singular Q - I triggers the one-shot rescale") {
    Matrix Q(2, 2);
    Q << 1, 0, 0, 3;  // Q - I singular
    LcpProblem lcp{Q, (Vector(2) << 1, 2).finished()};
    LcpToAveReduction red = lcp_to_ave(lcp);
    CHECK(red.scale == doctest::Approx(1.0 / (2.0 * 3.0)));
    Vector x = solve_standard_ave(red.gave);
    auto [w, z] = red.back_map(x);
    CHECK(verify_lcp(lcp, w, z, 1e-8).valid);
  }
  SUBCASE("random positive definite LCPs round-trip through the AVE") {
    RngStream rng(2);
    for (int round = 0; round < 20; ++round) {
      LcpProblem lcp = random_pd_lcp(4, rng);
      LcpToAveReduction red = lcp_to_ave(lcp);
      Vector x = solve_standard_ave(red.gave);
      auto [w, z] = red.back_map(x);
      CHECK(verify_lcp(lcp, w, z, 1e-8).valid);
      auto sols = enumerate_lcp(lcp);
      REQUIRE(sols.size() == 1);
      CHECK((w - sols[0].w).cwiseAbs().maxCoeff() <= 1e-6);
      CHECK((z - sols[0].z).cwiseAbs().maxCoeff() <= 1e-6);
    }
  }
}

TEST_CASE("reformulation I: scalar example A = 3, b = 2") {
  GaveProblem p(Matrix::Constant(1, 1, 3.0), Matrix::Identity(1, 1),
                Vector::Constant(1, 2.0));
  AveToLcpReduction red = ave_to_lcp_I(p);
  CHECK(red.lcp.Q(0, 0) == doctest::Approx(2.0));
  CHECK(red.lcp.q(0) == doctest::Approx(1.0));
  auto sols = enumerate_lcp(red.lcp);
  REQUIRE(sols.size() == 1);
  Vector x = red.recover_x(sols[0].w, sols[0].z);
  CHECK(x(0) == doctest::Approx(1.0));
  CHECK(residual(p, x).rre <= 1e-20);
}

TEST_CASE("reformulation I: A = 0 maps the zero solution to (0, 0)") {
  GaveProblem p(Matrix::Zero(2, 2), Matrix::Identity(2, 2), Vector::Zero(2));
  AveToLcpReduction red = ave_to_lcp_I(p);  // A - I = -I, fine
  Vector zero = Vector::Zero(2);
  CHECK(red.recover_x(zero, zero).norm() == 0.0);
  CHECK(verify_lcp(red.lcp, zero, zero, 1e-12).valid);
}

TEST_CASE("reformulation I rejects singular A - I") {
  GaveProblem p(Matrix::Identity(2, 2), Matrix::Identity(2, 2), Vector::Ones(2));
  try {
    ave_to_lcp_I(p);
    FAIL("expected PreconditionError");
  } catch (const PreconditionError& e) {
    CHECK(std::string(e.what()).find("Reformulation II or III") != std::string::npos);
  }
}

TEST_CASE("reformulation II: displayed block structure at n = 1, A = 2") {
  GaveProblem p(Matrix::Constant(1, 1, 2.0), Matrix::Identity(1, 1),
                Vector::Constant(1, 5.0));
  AveToLcpReduction red = ave_to_lcp_II(p);
  REQUIRE(red.lcp.Q.rows() == 3);
  Matrix expected(3, 3);
  expected << -1, 2, 0, 2, -3, 0, -2, 3, 0;
  CHECK((red.lcp.Q - expected).norm() == 0.0);
  Vector q_expected(3);
  q_expected << 0, -5, 5;
  CHECK((red.lcp.q - q_expected).norm() == 0.0);
}

TEST_CASE("reformulation II: b = 0 has the zero LCP solution mapping to x = 0") {
  GaveProblem p(3 * Matrix::Identity(2, 2), Matrix::Identity(2, 2), Vector::Zero(2));
  AveToLcpReduction red = ave_to_lcp_II(p);
  CHECK(red.lcp.Q.rows() == 6);  // structural: dims are exactly 3n
  Vector zero = Vector::Zero(6);
  CHECK(verify_lcp(red.lcp, zero, zero, 1e-12).valid);
  CHECK(red.recover_x(zero, zero).norm() == 0.0);
}

TEST_CASE("reformulation II: enumerated solution solves the original AVE") {
  GeneratorSpec spec;
  spec.m = 3;
  spec.n = 3;
  spec.a_min = 1.5;
  spec.b_max = 1.0;
  spec.seed = 3;
  GaveProblem gen = generate_spectral(spec);
  GaveProblem p(gen.A(), Matrix::Identity(3, 3), gen.b());
  AveToLcpReduction red = ave_to_lcp_II(p);
  auto sols = enumerate_lcp(red.lcp, 1e-7);
  REQUIRE(!sols.empty());
  Vector x = red.recover_x(sols[0].w, sols[0].z);
  CHECK((p.A() * x - x.cwiseAbs() - p.b()).norm() <= 1e-8 * (1 + p.b().norm()));
}

TEST_CASE("index selection: hand examples") {
  SUBCASE("P = I, Q = 0 keeps every index") {
    auto sel = select_indices(Matrix::Identity(2, 2), Matrix::Zero(2, 2));
    REQUIRE(sel.size() == 2);
    CHECK(sel[0] == 0);
    CHECK(sel[1] == 1);
  }
  SUBCASE("rank-one P keeps only the first index") {
    Matrix P(2, 2), Q(2, 2);
    P << 1, 0, 0, 0;
    Q << 0, 0, 0, 1;
    auto sel = select_indices(P, Q);
    REQUIRE(sel.size() == 1);
    CHECK(sel[0] == 0);
  }
  SUBCASE("rank precondition") {
    CHECK_THROWS_AS(select_indices(Matrix::Zero(2, 2), Matrix::Zero(2, 2)),
                    PreconditionError);
  }
}

TEST_CASE("index selection assembles a nonsingular column set") {
  RngStream rng(4);
  for (int round = 0; round < 20; ++round) {
    const int m = 2 + static_cast<int>(rng.uniform_int(5));
    Matrix P = test::random_matrix(m, m, rng);
    Matrix Q = test::random_matrix(m, m, rng);
    // rank(P + Q) = m holds almost surely for Gaussian draws
    auto sel = select_indices(P, Q);
    Matrix assembled(m, m);
    std::vector<bool> in_set(m, false);
    for (int i : sel) in_set[i] = true;
    for (int k = 0; k < m; ++k) assembled.col(k) = in_set[k] ? P.col(k) : Q.col(k);
    CHECK(std::abs(Eigen::FullPivLU<Matrix>(assembled).determinant()) > 1e-12);
  }
}

TEST_CASE("reformulation III: hand reductions") {
  SUBCASE("A = 3I: selection keeps all, reduced Q = 2I") {
    GaveProblem p(3 * Matrix::Identity(2, 2), Matrix::Identity(2, 2),
                  (Vector(2) << 2, 4).finished());
    AveToLcpReduction red = ave_to_lcp_III(p);
    CHECK(red.selected.size() == 2);
    CHECK((red.lcp.Q - 2 * Matrix::Identity(2, 2)).norm() <= 1e-14);
    auto sols = enumerate_lcp(red.lcp);
    REQUIRE(sols.size() == 1);
    Vector x = red.recover_x(sols[0].w, sols[0].z);
    CHECK(residual(p, x).rre <= 1e-20);
  }
  SUBCASE("A = 0: AD - I = -I and reduced Q = -I") {
    GaveProblem p(Matrix::Zero(2, 2), Matrix::Identity(2, 2), Vector::Zero(2));
    AveToLcpReduction red = ave_to_lcp_III(p);
    CHECK((red.lcp.Q + Matrix::Identity(2, 2)).norm() <= 1e-14);
  }
  SUBCASE("random 4x4: back-mapped solution satisfies the AVE") {
    GeneratorSpec spec;
    spec.m = 4;
    spec.n = 4;
    spec.a_min = 1.4;
    spec.b_max = 1.0;
    spec.seed = 5;
    GaveProblem gen = generate_spectral(spec);
    GaveProblem p(gen.A(), Matrix::Identity(4, 4), gen.b());
    AveToLcpReduction red = ave_to_lcp_III(p);
    auto sols = enumerate_lcp(red.lcp, 1e-7);
    REQUIRE(!sols.empty());
    Vector x = red.recover_x(sols[0].w, sols[0].z);
    CHECK((p.A() * x - x.cwiseAbs() - p.b()).norm() <= 1e-8 * (1 + p.b().norm()));
  }
}

TEST_CASE("reformulations I and III agree on instances where both apply") {
  RngStream rng(6);
  for (int round = 0; round < 10; ++round) {
    GeneratorSpec spec;
    spec.m = 3;
    spec.n = 3;
    spec.a_min = 1.5;  // sigma_n(A) > 1: unique solution, |eigs| > 1
    spec.b_max = 1.0;
    spec.kappa_a = 2.0;
    spec.seed = 100 + round;
    GaveProblem gen = generate_spectral(spec);
    GaveProblem p(gen.A(), Matrix::Identity(3, 3), gen.b());

    AveToLcpReduction r1 = ave_to_lcp_I(p);
    AveToLcpReduction r3 = ave_to_lcp_III(p);
    auto s1 = enumerate_lcp(r1.lcp, 1e-7);
    auto s3 = enumerate_lcp(r3.lcp, 1e-7);
    REQUIRE(!s1.empty());
    REQUIRE(!s3.empty());
    Vector x1 = r1.recover_x(s1[0].w, s1[0].z);
    Vector x3 = r3.recover_x(s3[0].w, s3[0].z);
    CHECK((x1 - x3).cwiseAbs().maxCoeff() <= 1e-6);
    CHECK(residual(p, x1).rre <= 1e-16);
  }
}

TEST_CASE("reformulations require the standard AVE form") {
  GaveProblem not_standard(Matrix::Identity(2, 2), 2 * Matrix::Identity(2, 2),
                           Vector::Zero(2));
  CHECK_THROWS_AS(ave_to_lcp_I(not_standard), PreconditionError);
  CHECK_THROWS_AS(ave_to_lcp_II(not_standard), PreconditionError);
  CHECK_THROWS_AS(ave_to_lcp_III(not_standard), PreconditionError);
}
