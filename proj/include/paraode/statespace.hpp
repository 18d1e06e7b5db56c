#pragma once

#include <functional>
#include <vector>

#include "paraode/jet.hpp"
#include "paraode/linalg.hpp"

namespace paraode {

// Gaussian distribution in square-root form.  cov_sqrt is lower triangular
// with cov = cov_sqrt cov_sqrt^T.
struct GaussianSqrt {
  Vector mean;
  Matrix cov_sqrt;
};

// First-order initial value problem y'(t) = f(y, t), y(0) = y0 on [0, t_end].
//
// `jacobian` is optional; when absent, linearization falls back to central
// finite differences.  `field_series` is the same field evaluated on
// truncated Taylor series and is required for exact initialization beyond
// first order (all shipped problems provide it).
struct InitialValueProblem {
  int dim = 0;
  double t_end = 0.0;
  Vector y0;
  std::function<Vector(const Vector&, double)> field;
  std::function<Matrix(const Vector&, double)> jacobian;
  std::function<JetVector(const JetVector&, const Jet&)> field_series;
};

// Affine observation  z = H y - offset  with noise covariance R = r_sqrt
// r_sqrt^T, observed at z = 0.  The ODE information operator uses R = 0
// (a noiseless constraint).  A zero-row H is a valid no-op observation.
struct AffineObservation {
  Matrix h;
  Vector offset;
  Matrix r_sqrt;
};

// Linear-Gaussian transition  y' = phi y + w,  w ~ N(0, q_sqrt q_sqrt^T),
// over a step of length `step`.
struct TransitionModel {
  Matrix phi;
  Matrix q_sqrt;
  double step = 0.0;
};

// A sequence of full-order states along a time grid.
struct StateTrajectory {
  std::vector<double> times;
  std::vector<Vector> states;
};

// Selector of the i-th derivative block: the d x d(nu+1) matrix E_i with
// E_i y = (i-th derivative of each solution dimension).  States are laid
// out dimension-major: [y_1, y_1', ..., y_1^(nu), y_2, y_2', ...].
Matrix projection_matrix(int dim, int nu, int deriv);

// Central finite-difference Jacobian of `field` at (y, t), step
// 1e-6 * max(1, |y_j|) per column.
Matrix fd_jacobian(const std::function<Vector(const Vector&, double)>& field,
                   const Vector& y, double t);

// First-order (EK1) linearization of the ODE information operator at the
// full-order state eta:
//   H = E_1 - F_y(E_0 eta, t) E_0,   offset = f(E_0 eta, t) - F_y E_0 eta,
// so that H eta - offset = E_1 eta - f(E_0 eta, t).  R = 0.
AffineObservation linearize_ek1(const InitialValueProblem& ivp, const Vector& eta, double t);

// Zeroth-order (EK0) linearization: H = E_1, offset = f(E_0 eta, t).
AffineObservation linearize_ek0(const InitialValueProblem& ivp, const Vector& eta, double t);

enum class Linearization { kEk1, kEk0 };

AffineObservation linearize(const InitialValueProblem& ivp, const Vector& eta, double t,
                            Linearization kind);

}  // namespace paraode
