#include <doctest.h>

#include <limits>

#include "oracles.hpp"
#include "paraode/linalg.hpp"

using namespace paraode;
using namespace paraode::testing;

TEST_CASE("tria norm example on a single row") {
  Matrix m(1, 2);
  m << 3.0, 4.0;
  const Matrix t = tria(m);
  REQUIRE(t.rows() == 1);
  REQUIRE(t.cols() == 1);
  CHECK(std::abs(t(0, 0)) == doctest::Approx(5.0).epsilon(1e-14));
}

TEST_CASE("tria preserves the product and returns a lower-triangular square factor") {
  std::mt19937 rng(11);
  SUBCASE("wide input") {
    const Matrix m = random_matrix(3, 5, rng);
    const Matrix t = tria(m);
    REQUIRE(t.rows() == 3);
    REQUIRE(t.cols() == 3);
    CHECK(is_lower_triangular(t));
    CHECK(max_abs_diff(dense_cov(t), m * m.transpose()) <= 1e-12);
  }
  SUBCASE("square input") {
    const Matrix m = random_matrix(4, 4, rng);
    const Matrix t = tria(m);
    CHECK(is_lower_triangular(t));
    CHECK(max_abs_diff(dense_cov(t), m * m.transpose()) <= 1e-12);
  }
  SUBCASE("input with fewer columns than rows is zero-padded") {
    const Matrix m = random_matrix(4, 2, rng);
    const Matrix t = tria(m);
    REQUIRE(t.rows() == 4);
    REQUIRE(t.cols() == 4);
    CHECK(max_abs_diff(dense_cov(t), m * m.transpose()) <= 1e-12);
  }
}

TEST_CASE("tria of a lower-triangular factor padded with zero columns keeps its product exactly") {
  std::mt19937 rng(12);
  const Matrix l = random_spd_sqrt(3, rng);
  Matrix padded(3, 5);
  padded << l, Matrix::Zero(3, 2);
  const Matrix t = tria(padded);
  CHECK(max_abs_diff(dense_cov(t), dense_cov(l)) <= 1e-14);
}

TEST_CASE("tria is deterministic") {
  std::mt19937 rng(13);
  const Matrix m = random_matrix(5, 7, rng);
  const Matrix a = tria(m);
  const Matrix b = tria(m);
  CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("tria rejects non-finite input") {
  Matrix m = Matrix::Zero(2, 3);
  m(1, 2) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(tria(m), InvalidInputError);
}

TEST_CASE("sqrt_sum adds covariances in product form") {
  std::mt19937 rng(14);
  const Matrix a = random_spd_sqrt(4, rng);
  const Matrix b = random_spd_sqrt(4, rng);
  const Matrix s = sqrt_sum(a, b);
  CHECK(is_lower_triangular(s));
  CHECK(max_abs_diff(dense_cov(s), dense_cov(a) + dense_cov(b)) <= 1e-12);

  // Commutative in the product sense.
  const Matrix s2 = sqrt_sum(b, a);
  CHECK(max_abs_diff(dense_cov(s), dense_cov(s2)) <= 1e-12);

  // Zero second factor is an additive identity (product form).
  const Matrix s3 = sqrt_sum(a, Matrix::Zero(4, 4));
  CHECK(max_abs_diff(dense_cov(s3), dense_cov(a)) <= 1e-13);

  // Two identities sum to 2I.
  const Matrix two = sqrt_sum(Matrix::Identity(2, 2), Matrix::Identity(2, 2));
  CHECK(max_abs_diff(dense_cov(two), Matrix(2.0 * Matrix::Identity(2, 2))) <= 1e-13);

  CHECK_THROWS_AS(sqrt_sum(a, Matrix::Zero(3, 3)), DimensionError);
}

TEST_CASE("whitened_sq_norm equals the dense quadratic form") {
  SUBCASE("zero vector") {
    CHECK(whitened_sq_norm(Vector::Zero(3), Matrix::Identity(3, 3)) == 0.0);
  }
  SUBCASE("identity whitening") {
    Vector v(2);
    v << 3.0, 4.0;
    CHECK(whitened_sq_norm(v, Matrix::Identity(2, 2)) == doctest::Approx(25.0));
  }
  SUBCASE("triangular factor vs dense inverse") {
    Matrix l(2, 2);
    l << 2.0, 0.0, 1.0, 1.0;
    Vector v(2);
    v << 2.0, 2.0;
    const Matrix q = dense_cov(l);
    const double expected = v.dot(q.inverse() * v);
    CHECK(whitened_sq_norm(v, l) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(whitened_sq_norm(v, l) == doctest::Approx(2.0).epsilon(1e-12));
  }
  SUBCASE("random factor vs dense inverse") {
    std::mt19937 rng(15);
    const Matrix l = random_spd_sqrt(5, rng);
    const Vector v = random_vector(5, rng);
    const double expected = v.dot(dense_cov(l).inverse() * v);
    CHECK(whitened_sq_norm(v, l) == doctest::Approx(expected).epsilon(1e-10));
  }
  SUBCASE("errors") {
    Matrix singular = Matrix::Identity(2, 2);
    singular(1, 1) = 0.0;
    CHECK_THROWS_AS(whitened_sq_norm(Vector::Ones(2), singular), SingularFactorError);
    CHECK_THROWS_AS(whitened_sq_norm(Vector::Ones(3), Matrix::Identity(2, 2)), DimensionError);
    Vector bad = Vector::Ones(2);
    bad(0) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(whitened_sq_norm(bad, Matrix::Identity(2, 2)), InvalidInputError);
  }
}

TEST_CASE("require_nonsingular_triangular flags zero diagonals only") {
  Matrix ok = Matrix::Identity(3, 3);
  ok(2, 2) = 1e-10;
  CHECK_NOTHROW(require_nonsingular_triangular(ok, "test"));
  Matrix bad = Matrix::Identity(3, 3);
  bad(1, 1) = 1e-14;
  CHECK_THROWS_AS(require_nonsingular_triangular(bad, "test"), SingularFactorError);
}

TEST_CASE("is_lower_triangular checks exact zeros above the diagonal") {
  Matrix m = Matrix::Zero(3, 3);
  m(2, 0) = 4.0;
  CHECK(is_lower_triangular(m));
  m(0, 2) = 1e-300;
  CHECK(!is_lower_triangular(m));
}
