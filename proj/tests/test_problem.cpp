#include <doctest.h>

#include <cstring>
#include <gave/json_io.hpp>
#include <gave/problem.hpp>

#include "test_util.hpp"

using namespace gave;

TEST_CASE("eval_F on identity matrices") {
  GaveProblem p(Matrix::Identity(2, 2), Matrix::Identity(2, 2), Vector::Zero(2));
  Vector x(2);
  x << 1, -1;
  Vector f = eval_F(p, x);
  CHECK(f(0) == doctest::Approx(0.0));
  CHECK(f(1) == doctest::Approx(-2.0));
}

TEST_CASE("eval_F zero map") {
  GaveProblem p(Matrix::Zero(3, 2), Matrix::Zero(3, 2), Vector::Zero(3));
  Vector x(2);
  x << 4.5, -7.25;
  CHECK(eval_F(p, x).norm() == 0.0);
}

TEST_CASE("eval_F on the 2x2 example pair") {
  Matrix A(2, 2), B(2, 2);
  A << -7, 11, 10, -2;
  B << -2, 2, 6, 0;
  GaveProblem p(A, B, Vector::Zero(2));
  Vector x = Vector::Ones(2);
  // A x = (4, 8), B |x| = (0, 6)
  Vector f = eval_F(p, x);
  CHECK(f(0) == doctest::Approx(4.0));
  CHECK(f(1) == doctest::Approx(2.0));
}

TEST_CASE("eval_F rejects a wrong-length x with a structured message") {
  GaveProblem p(Matrix::Identity(3, 3), Matrix::Identity(3, 3), Vector::Zero(3));
  try {
    eval_F(p, Vector::Zero(5));
    FAIL("expected invalid_argument");
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    CHECK(msg.find("expected length 3") != std::string::npos);
    CHECK(msg.find("got 5") != std::string::npos);
  }
}

TEST_CASE("problem constructor enforces shapes and the stored solution") {
  CHECK_THROWS_AS(GaveProblem(Matrix::Identity(2, 2), Matrix::Identity(3, 3),
                              Vector::Zero(2)),
                  std::invalid_argument);
  CHECK_THROWS_AS(GaveProblem(Matrix::Identity(2, 2), Matrix::Identity(2, 2),
                              Vector::Zero(5)),
                  std::invalid_argument);
  // x = (1, 1) does not solve I x - I |x| = e.
  CHECK_THROWS_AS(GaveProblem(Matrix::Identity(2, 2), Matrix::Identity(2, 2),
                              Vector::Ones(2), Vector::Ones(2)),
                  std::invalid_argument);
}

TEST_CASE("residual at the stored solution is exactly zero") {
  RngStream rng(7);
  Matrix A = test::random_matrix(6, 4, rng);
  Matrix B = 0.25 * test::random_matrix(6, 4, rng);
  Vector xs = test::random_vector(4, rng);
  Vector b = A * xs - B * xs.cwiseAbs();
  GaveProblem p(A, B, b, xs);
  ResidualMetrics m = residual(p, xs);
  CHECK(m.rre <= 1e-20);
  REQUIRE(m.rse.has_value());
  CHECK(*m.rse == 0.0);
}

TEST_CASE("residual falls back to the absolute residual when b = 0") {
  GaveProblem p(Matrix::Identity(2, 2), Matrix::Zero(2, 2), Vector::Zero(2));
  Vector x(2);
  x << 3, 0;  // ||F(x)|| = 3
  CHECK(residual(p, x).rre == doctest::Approx(9.0));
}

TEST_CASE("rre matches direct recomputation on a random instance") {
  RngStream rng(11);
  Matrix A = test::random_matrix(10, 10, rng);
  Matrix B = test::random_matrix(10, 10, rng);
  Vector b = test::random_vector(10, rng);
  GaveProblem p(A, B, b);
  Vector x = test::random_vector(10, rng);
  const double oracle =
      (A * x - B * x.cwiseAbs() - b).squaredNorm() / b.squaredNorm();
  CHECK(residual(p, x).rre == doctest::Approx(oracle).epsilon(1e-14));
  CHECK_FALSE(residual(p, x).rse.has_value());
}

// F(x) - F(y) = (A + B D)(x - y) for a diagonal D with entries in [-1, 1].
TEST_CASE("difference of F factors through a contraction diagonal") {
  RngStream rng(13);
  for (int round = 0; round < 25; ++round) {
    const int m = 3 + static_cast<int>(rng.uniform_int(5));
    const int n = 2 + static_cast<int>(rng.uniform_int(5));
    Matrix A = test::random_matrix(m, n, rng);
    Matrix B = test::random_matrix(m, n, rng);
    GaveProblem p(A, B, Vector::Zero(m));
    Vector x = test::random_vector(n, rng);
    Vector y = test::random_vector(n, rng);
    if (round % 5 == 0) y(0) = x(0);  // exercise the x_i == y_i branch

    Vector d(n);
    for (int i = 0; i < n; ++i) {
      const double dx = x(i) - y(i);
      d(i) = dx != 0.0 ? (std::abs(y(i)) - std::abs(x(i))) / dx : 0.0;
      CHECK(std::abs(d(i)) <= 1.0 + 1e-12);
    }
    Vector lhs = eval_F(p, x) - eval_F(p, y);
    Vector rhs = (A + B * d.asDiagonal()) * (x - y);
    CHECK((lhs - rhs).norm() <= 1e-10 * (1.0 + lhs.norm()));
  }
}

TEST_CASE("problem JSON round-trips bit-exactly") {
  RngStream rng(17);
  Matrix A = test::random_matrix(5, 3, rng);
  Matrix B = test::random_matrix(5, 3, rng);
  // extreme but finite magnitudes
  A(0, 0) = 1e308;
  A(1, 1) = -3e-308;
  A(2, 2) = -0.0;
  Vector xs = test::random_vector(3, rng);
  Vector b = A * xs - B * xs.cwiseAbs();
  GaveProblem p(A, B, b, xs, 42);

  GaveProblem q = problem_from_json(problem_to_json(p));
  CHECK(std::memcmp(p.A().data(), q.A().data(), sizeof(double) * 15) == 0);
  CHECK(std::memcmp(p.B().data(), q.B().data(), sizeof(double) * 15) == 0);
  CHECK(std::memcmp(p.b().data(), q.b().data(), sizeof(double) * 5) == 0);
  REQUIRE(q.known_solution().has_value());
  CHECK(std::memcmp(p.known_solution()->data(), q.known_solution()->data(),
                    sizeof(double) * 3) == 0);
  REQUIRE(q.seed().has_value());
  CHECK(*q.seed() == 42);

  // And the serialized text itself is a fixed point.
  CHECK(problem_to_json(p) == problem_to_json(q));
}

TEST_CASE("problem JSON rejects malformed documents") {
  CHECK_THROWS_AS(problem_from_json("{\"m\":2,\"n\":2}"), std::invalid_argument);
  CHECK_THROWS_AS(
      problem_from_json(
          "{\"m\":2,\"n\":1,\"A\":[1,2,3],\"B\":[1,2],\"b\":[1,2]}"),
      std::invalid_argument);
}
