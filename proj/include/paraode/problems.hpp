#pragma once

#include <functional>
#include <string>
#include <vector>

#include "paraode/statespace.hpp"

namespace paraode {

// Dense reference trajectory from classical fixed-step Runge-Kutta 4.
// Construction integrates with steps h_ref and h_ref/2 and requires the two
// endpoints to agree to 1e-10 (relative); otherwise it throws
// ReferenceError.  The finer table is kept; evaluation snaps to a table
// node when t is within rounding of one and interpolates linearly
// otherwise.
class Rk4Reference {
 public:
  Rk4Reference(const InitialValueProblem& ivp, double h_ref);

  Vector at(double t) const;
  double table_step() const { return step_; }

 private:
  double step_ = 0.0;
  double t_end_ = 0.0;
  std::vector<Vector> table_;
};

Rk4Reference rk4_reference(const InitialValueProblem& ivp, double h_ref);

// A shipped benchmark problem: the IVP plus a trusted reference solution.
struct NamedProblem {
  std::string name;
  InitialValueProblem ivp;
  std::function<Vector(double)> reference;
};

// Logistic growth y' = y (1 - y), y(0) = 0.01 on [0, 10]; closed-form
// reference.
NamedProblem logistic();

// Euler's rigid-body equations with inertia-coded coefficients,
// y' = (-2 y2 y3, 1.25 y1 y3, -0.5 y1 y2), y(0) = (1, 0, 0.9) on [0, 20].
NamedProblem rigid_body();

// Van der Pol oscillator with mu = 1, y' = (y2, mu ((1 - y1^2) y2 - y1)),
// y(0) = (2, 0) on [0, 6.3].
NamedProblem van_der_pol();

// All shipped problems, in the order above.
std::vector<NamedProblem> shipped_problems();

// Lookup by CLI name ("logistic", "rigidbody", "vanderpol"); throws
// InvalidInputError on unknown names.
NamedProblem problem_by_name(const std::string& name);

// Root-mean-square error of the projected means against the reference,
// averaged over grid nodes and solution dimensions.
double rmse(const std::vector<Vector>& means, const std::function<Vector(double)>& reference,
            const std::vector<double>& grid);

// Uniform grid of n steps: n+1 nodes from 0 to t_end inclusive.
std::vector<double> uniform_grid(double t_end, int steps);

}  // namespace paraode
