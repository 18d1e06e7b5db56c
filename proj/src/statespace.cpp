#include "paraode/statespace.hpp"

#include <algorithm>
#include <cmath>

namespace paraode {

Matrix projection_matrix(int dim, int nu, int deriv) {
  if (dim < 1 || nu < 0 || deriv < 0 || deriv > nu) {
    throw InvalidInputError("projection_matrix: need dim >= 1 and 0 <= deriv <= nu");
  }
  Matrix e = Matrix::Zero(dim, dim * (nu + 1));
  for (int r = 0; r < dim; ++r) {
    e(r, r * (nu + 1) + deriv) = 1.0;
  }
  return e;
}

Matrix fd_jacobian(const std::function<Vector(const Vector&, double)>& field,
                   const Vector& y, double t) {
  const Eigen::Index d = y.size();
  Matrix jac(field(y, t).size(), d);
  Vector lo = y, hi = y;
  for (Eigen::Index j = 0; j < d; ++j) {
    const double step = 1e-6 * std::max(1.0, std::abs(y(j)));
    hi(j) = y(j) + step;
    lo(j) = y(j) - step;
    jac.col(j) = (field(hi, t) - field(lo, t)) / (2.0 * step);
    hi(j) = y(j);
    lo(j) = y(j);
  }
  return jac;
}

namespace {

// Recover (d, nu) from the full state length and pull out E_0 eta.
struct StateShape {
  int dim;
  int nu;
};

StateShape shape_for(const InitialValueProblem& ivp, const Vector& eta) {
  if (ivp.dim < 1) throw InvalidInputError("linearize: problem dimension must be >= 1");
  if (eta.size() % ivp.dim != 0 || eta.size() < 2 * ivp.dim) {
    throw DimensionError("linearize: state length must be dim * (nu + 1) with nu >= 1");
  }
  return {ivp.dim, static_cast<int>(eta.size() / ivp.dim) - 1};
}

Vector gather_solution(const Vector& eta, int dim, int nu) {
  Vector y(dim);
  for (int r = 0; r < dim; ++r) y(r) = eta(r * (nu + 1));
  return y;
}

void check_finite(const Vector& fy, const InitialValueProblem&, double t) {
  if (!fy.allFinite()) {
    throw LinearizationError("linearize: vector field evaluation is not finite", t, 0);
  }
}

}  // namespace

AffineObservation linearize_ek1(const InitialValueProblem& ivp, const Vector& eta, double t) {
  const auto [dim, nu] = shape_for(ivp, eta);
  const Vector y = gather_solution(eta, dim, nu);
  const Vector fy = ivp.field(y, t);
  check_finite(fy, ivp, t);
  const Matrix jac = ivp.jacobian ? ivp.jacobian(y, t) : fd_jacobian(ivp.field, y, t);
  if (!jac.allFinite()) {
    throw LinearizationError("linearize: Jacobian evaluation is not finite", t, 0);
  }

  // H = E_1 - F_y E_0, built entry-wise: E_1 selects derivative slots, F_y E_0
  // scatters the Jacobian over the solution slots.
  const Eigen::Index state_dim = eta.size();
  Matrix h = Matrix::Zero(dim, state_dim);
  for (int r = 0; r < dim; ++r) {
    h(r, r * (nu + 1) + 1) = 1.0;
    for (int c = 0; c < dim; ++c) h(r, c * (nu + 1)) = -jac(r, c);
  }
  AffineObservation obs;
  obs.h = std::move(h);
  obs.offset = fy - jac * y;
  obs.r_sqrt = Matrix::Zero(dim, dim);
  return obs;
}

AffineObservation linearize_ek0(const InitialValueProblem& ivp, const Vector& eta, double t) {
  const auto [dim, nu] = shape_for(ivp, eta);
  const Vector y = gather_solution(eta, dim, nu);
  const Vector fy = ivp.field(y, t);
  check_finite(fy, ivp, t);

  Matrix h = Matrix::Zero(dim, eta.size());
  for (int r = 0; r < dim; ++r) h(r, r * (nu + 1) + 1) = 1.0;
  AffineObservation obs;
  obs.h = std::move(h);
  obs.offset = fy;
  obs.r_sqrt = Matrix::Zero(dim, dim);
  return obs;
}

AffineObservation linearize(const InitialValueProblem& ivp, const Vector& eta, double t,
                            Linearization kind) {
  return kind == Linearization::kEk1 ? linearize_ek1(ivp, eta, t) : linearize_ek0(ivp, eta, t);
}

}  // namespace paraode
