#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "paraode/problems.hpp"

using namespace paraode;
using namespace paraode::testing;

namespace {

InitialValueProblem scalar_decay(double rate, double t_end) {
  InitialValueProblem ivp;
  ivp.dim = 1;
  ivp.t_end = t_end;
  ivp.y0 = Vector::Ones(1);
  ivp.field = [rate](const Vector& y, double) -> Vector { return -rate * y; };
  return ivp;
}

Vector field_series_at_zero_order(const InitialValueProblem& ivp, const Vector& y, double t) {
  JetVector jets;
  for (Eigen::Index i = 0; i < y.size(); ++i) jets.push_back(Jet::constant(y(i), 3));
  const JetVector out = ivp.field_series(jets, Jet::variable(t, 3));
  Vector v(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) v(i) = out[static_cast<std::size_t>(i)].coeff(0);
  return v;
}

}  // namespace

TEST_CASE("shipped vector fields have the advertised values and Jacobians") {
  SUBCASE("logistic") {
    const NamedProblem p = logistic();
    CHECK(p.ivp.field(p.ivp.y0, 0.0)(0) == doctest::Approx(0.0099).epsilon(1e-14));
    CHECK(p.ivp.jacobian(p.ivp.y0, 0.0)(0, 0) == doctest::Approx(0.98).epsilon(1e-14));
  }
  SUBCASE("rigid body") {
    const NamedProblem p = rigid_body();
    const Vector f = p.ivp.field(p.ivp.y0, 0.0);
    CHECK(f(0) == 0.0);
    CHECK(f(1) == doctest::Approx(1.125).epsilon(1e-14));
    CHECK(f(2) == 0.0);
    const Matrix jac = p.ivp.jacobian(p.ivp.y0, 0.0);
    CHECK(jac(0, 0) == 0.0);
    CHECK(jac(0, 1) == doctest::Approx(-1.8).epsilon(1e-14));
    CHECK(jac(0, 2) == 0.0);
  }
  SUBCASE("van der Pol") {
    const NamedProblem p = van_der_pol();
    const Vector f = p.ivp.field(p.ivp.y0, 0.0);
    CHECK(f(0) == 0.0);
    CHECK(f(1) == doctest::Approx(-2.0).epsilon(1e-14));
    Matrix want(2, 2);
    want << 0.0, 1.0, -1.0, -3.0;
    CHECK(max_abs_diff(p.ivp.jacobian(p.ivp.y0, 0.0), want) <= 1e-14);
  }
}

TEST_CASE("analytic Jacobians agree with finite differences") {
  std::mt19937 rng(71);
  for (const NamedProblem& p : shipped_problems()) {
    for (int rep = 0; rep < 3; ++rep) {
      const Vector y = p.ivp.y0 + 0.3 * random_vector(p.ivp.dim, rng);
      const Matrix analytic = p.ivp.jacobian(y, 0.0);
      const Matrix numeric = fd_jacobian(p.ivp.field, y, 0.0);
      CHECK(max_abs_diff(analytic, numeric) <= 1e-6);
    }
  }
}

TEST_CASE("series evaluation of each field reduces to the plain field at order zero") {
  std::mt19937 rng(72);
  for (const NamedProblem& p : shipped_problems()) {
    const Vector y = p.ivp.y0 + 0.1 * random_vector(p.ivp.dim, rng);
    const Vector direct = p.ivp.field(y, 0.0);
    const Vector from_series = field_series_at_zero_order(p.ivp, y, 0.0);
    CHECK(max_abs_diff(direct, from_series) <= 1e-14);
  }
}

TEST_CASE("logistic reference is the closed-form sigmoid") {
  const NamedProblem p = logistic();
  CHECK(p.reference(0.0)(0) == doctest::Approx(0.01).epsilon(1e-15));
  const double want = 0.01 / (0.01 + 0.99 * std::exp(-10.0));
  CHECK(p.reference(10.0)(0) == doctest::Approx(want).epsilon(1e-14));
  CHECK(p.reference(10.0)(0) == doctest::Approx(0.99552).epsilon(1e-4));
  double prev = 0.0;
  for (double t : uniform_grid(10.0, 50)) {
    const double y = p.reference(t)(0);
    CHECK(y > prev);
    CHECK(y < 1.0);
    prev = y;
  }
}

TEST_CASE("fixed-step integration reproduces known decay solutions") {
  SUBCASE("linear decay") {
    const InitialValueProblem ivp = scalar_decay(1.0, 2.0);
    const Rk4Reference ref = rk4_reference(ivp, 2.0 / 4096.0);
    CHECK(std::abs(ref.at(2.0)(0) - std::exp(-2.0)) <= 1e-10);
    CHECK(std::abs(ref.at(1.0)(0) - std::exp(-1.0)) <= 1e-10);
  }
  SUBCASE("logistic against its closed form") {
    const NamedProblem p = logistic();
    const Rk4Reference ref = rk4_reference(p.ivp, 10.0 / 8192.0);
    for (double t : {0.0, 2.5, 5.0, 7.5, 10.0}) {
      CHECK(std::abs(ref.at(t)(0) - p.reference(t)(0)) <= 1e-9);
    }
  }
}

TEST_CASE("reference tables snap to nodes and interpolate between them") {
  // y' = 3 t^2 integrates exactly under the classical scheme (Simpson), so
  // the coarse table is usable and every value is y = 1 + t^3 to rounding.
  InitialValueProblem ivp;
  ivp.dim = 1;
  ivp.t_end = 1.0;
  ivp.y0 = Vector::Ones(1);
  ivp.field = [](const Vector&, double t) -> Vector { return Vector::Constant(1, 3.0 * t * t); };
  const Rk4Reference ref = rk4_reference(ivp, 0.25);  // fine table step 0.125
  CHECK(ref.table_step() == doctest::Approx(0.125).epsilon(1e-15));
  CHECK(ref.at(0.25)(0) == doctest::Approx(1.0 + 0.015625).epsilon(1e-13));
  const double lo = ref.at(0.125)(0);
  const double hi = ref.at(0.25)(0);
  // Halfway between two nodes the result is their average.
  CHECK(ref.at(0.1875)(0) == doctest::Approx(0.5 * (lo + hi)).epsilon(1e-13));
  CHECK_THROWS_AS(ref.at(-0.5), InvalidInputError);
  CHECK_THROWS_AS(ref.at(1.5), InvalidInputError);
}

TEST_CASE("a too-coarse reference step fails the step-halving self check") {
  const InitialValueProblem ivp = scalar_decay(50.0, 5.0);
  CHECK_THROWS_AS(rk4_reference(ivp, 1.0), ReferenceError);
}

TEST_CASE("rigid-body reference conserves both quadratic invariants") {
  const NamedProblem p = rigid_body();
  const Vector y0 = p.ivp.y0;
  const double i1_0 = y0(0) * y0(0) + 1.6 * y0(1) * y0(1);
  const double i2_0 = 0.4 * y0(1) * y0(1) + y0(2) * y0(2);
  // 64 divides the internal table size, so every sample hits a table node
  // and the drift measures the integrator, not interpolation.
  for (double t : uniform_grid(p.ivp.t_end, 64)) {
    const Vector y = p.reference(t);
    const double i1 = y(0) * y(0) + 1.6 * y(1) * y(1);
    const double i2 = 0.4 * y(1) * y(1) + y(2) * y(2);
    CHECK(std::abs(i1 - i1_0) <= 1e-8);
    CHECK(std::abs(i2 - i2_0) <= 1e-8);
  }
}

TEST_CASE("root-mean-square error behaves on constructed inputs") {
  const std::vector<double> grid = {0.0, 1.0, 2.0};
  auto ref = [](double t) { return Vector::Constant(2, t); };
  SUBCASE("exact means give zero") {
    const std::vector<Vector> means = {Vector::Constant(2, 0.0), Vector::Constant(2, 1.0),
                                       Vector::Constant(2, 2.0)};
    CHECK(rmse(means, ref, grid) == 0.0);
  }
  SUBCASE("a constant offset is returned verbatim") {
    std::vector<Vector> means;
    for (double t : grid) means.push_back(Vector::Constant(2, t + 0.5));
    CHECK(rmse(means, ref, grid) == doctest::Approx(0.5).epsilon(1e-14));
  }
  SUBCASE("length mismatches throw") {
    const std::vector<Vector> means = {Vector::Zero(2)};
    CHECK_THROWS_AS(rmse(means, ref, grid), DimensionError);
    CHECK_THROWS_AS(rmse({}, ref, {}), DimensionError);
  }
}

TEST_CASE("uniform grids span the horizon inclusively") {
  const std::vector<double> grid = uniform_grid(2.0, 4);
  REQUIRE(grid.size() == 5);
  CHECK(grid.front() == 0.0);
  CHECK(grid.back() == 2.0);
  CHECK(grid[2] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(uniform_grid(2.0, 0), InvalidInputError);
  CHECK_THROWS_AS(uniform_grid(-1.0, 4), InvalidInputError);
  CHECK_THROWS_AS(uniform_grid(0.0, 4), InvalidInputError);
}

TEST_CASE("problem lookup accepts the shipped names only") {
  CHECK(problem_by_name("logistic").ivp.dim == 1);
  CHECK(problem_by_name("rigidbody").ivp.dim == 3);
  CHECK(problem_by_name("vanderpol").ivp.dim == 2);
  CHECK_THROWS_AS(problem_by_name("lorenz"), InvalidInputError);
}
