#include "paraode/problems.hpp"

#include <cmath>
#include <memory>
#include <utility>

namespace paraode {

namespace {

std::vector<Vector> integrate_rk4(const InitialValueProblem& ivp, std::size_t steps) {
  const double h = ivp.t_end / static_cast<double>(steps);
  std::vector<Vector> table;
  table.reserve(steps + 1);
  table.push_back(ivp.y0);
  Vector y = ivp.y0;
  for (std::size_t n = 0; n < steps; ++n) {
    const double t = ivp.t_end * static_cast<double>(n) / static_cast<double>(steps);
    const Vector k1 = ivp.field(y, t);
    const Vector k2 = ivp.field(y + 0.5 * h * k1, t + 0.5 * h);
    const Vector k3 = ivp.field(y + 0.5 * h * k2, t + 0.5 * h);
    const Vector k4 = ivp.field(y + h * k3, t + h);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!y.allFinite()) throw ReferenceError("rk4_reference: integration diverged");
    table.push_back(y);
  }
  return table;
}

}  // namespace

Rk4Reference::Rk4Reference(const InitialValueProblem& ivp, double h_ref) {
  if (!(h_ref > 0.0) || !(ivp.t_end > 0.0)) {
    throw InvalidInputError("rk4_reference: need positive step and horizon");
  }
  const auto steps = static_cast<std::size_t>(std::llround(std::ceil(ivp.t_end / h_ref)));
  const std::vector<Vector> coarse = integrate_rk4(ivp, steps);
  std::vector<Vector> fine = integrate_rk4(ivp, 2 * steps);

  // Step-halving self check on the endpoint.
  const double scale = std::max(1.0, fine.back().norm());
  if ((coarse.back() - fine.back()).norm() > 1e-10 * scale) {
    throw ReferenceError("rk4_reference: step-halving check failed; h_ref is too coarse");
  }
  table_ = std::move(fine);
  t_end_ = ivp.t_end;
  step_ = ivp.t_end / static_cast<double>(table_.size() - 1);
}

Vector Rk4Reference::at(double t) const {
  if (t < -1e-12 || t > t_end_ * (1.0 + 1e-12)) {
    throw InvalidInputError("Rk4Reference: evaluation outside the integrated span");
  }
  const double x = t / step_;
  const auto nearest = static_cast<std::size_t>(
      std::min<double>(std::max(0.0, std::round(x)), static_cast<double>(table_.size() - 1)));
  if (std::abs(t - static_cast<double>(nearest) * step_) <= 1e-9 * std::max(1.0, std::abs(t))) {
    return table_[nearest];
  }
  const auto lo = static_cast<std::size_t>(std::min<double>(
      std::max(0.0, std::floor(x)), static_cast<double>(table_.size() - 2)));
  const double w = (t - static_cast<double>(lo) * step_) / step_;
  return (1.0 - w) * table_[lo] + w * table_[lo + 1];
}

Rk4Reference rk4_reference(const InitialValueProblem& ivp, double h_ref) {
  return Rk4Reference(ivp, h_ref);
}

namespace {

// One field definition serves both evaluation modes; the lambdas below
// instantiate it for plain vectors and for truncated series.
template <typename Vec, typename Scalar>
Vec logistic_field(const Vec& y, const Scalar&) {
  Vec out(1, y[0]);
  out[0] = y[0] * (1.0 - y[0]);
  return out;
}

template <typename Vec, typename Scalar>
Vec rigid_body_field(const Vec& y, const Scalar&) {
  Vec out(3, y[0]);
  out[0] = -2.0 * (y[1] * y[2]);
  out[1] = 1.25 * (y[0] * y[2]);
  out[2] = -0.5 * (y[0] * y[1]);
  return out;
}

template <typename Vec, typename Scalar>
Vec van_der_pol_field(const Vec& y, const Scalar&) {
  const double mu = 1.0;
  Vec out(2, y[0]);
  out[0] = y[1];
  out[1] = mu * ((1.0 - y[0] * y[0]) * y[1] - y[0]);
  return out;
}

Vector to_vector(const std::vector<double>& v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (Eigen::Index i = 0; i < out.size(); ++i) out(i) = v[static_cast<std::size_t>(i)];
  return out;
}

std::vector<double> to_std(const Vector& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

// Reference tables are integrated once per factory call with a step fine
// enough for the self check and for interpolation error well below every
// accuracy level probed by the benchmarks.
constexpr double kReferenceSteps = 32768.0;

}  // namespace

NamedProblem logistic() {
  NamedProblem p;
  p.name = "logistic";
  p.ivp.dim = 1;
  p.ivp.t_end = 10.0;
  p.ivp.y0 = Vector::Constant(1, 0.01);
  p.ivp.field = [](const Vector& y, double t) {
    return to_vector(logistic_field(to_std(y), t));
  };
  p.ivp.jacobian = [](const Vector& y, double) {
    return Matrix::Constant(1, 1, 1.0 - 2.0 * y(0));
  };
  p.ivp.field_series = [](const JetVector& y, const Jet& t) { return logistic_field(y, t); };
  // y(t) = y0 / (y0 + (1 - y0) exp(-t)), written to avoid overflowing exp.
  const double y0 = 0.01;
  p.reference = [y0](double t) {
    return Vector::Constant(1, y0 / (y0 + (1.0 - y0) * std::exp(-t)));
  };
  return p;
}

NamedProblem rigid_body() {
  NamedProblem p;
  p.name = "rigidbody";
  p.ivp.dim = 3;
  p.ivp.t_end = 20.0;
  p.ivp.y0 = to_vector({1.0, 0.0, 0.9});
  p.ivp.field = [](const Vector& y, double t) {
    return to_vector(rigid_body_field(to_std(y), t));
  };
  p.ivp.jacobian = [](const Vector& y, double) {
    Matrix jac(3, 3);
    jac << 0.0, -2.0 * y(2), -2.0 * y(1),  //
        1.25 * y(2), 0.0, 1.25 * y(0),     //
        -0.5 * y(1), -0.5 * y(0), 0.0;
    return jac;
  };
  p.ivp.field_series = [](const JetVector& y, const Jet& t) { return rigid_body_field(y, t); };
  auto ref = std::make_shared<Rk4Reference>(p.ivp, p.ivp.t_end / kReferenceSteps);
  p.reference = [ref](double t) { return ref->at(t); };
  return p;
}

NamedProblem van_der_pol() {
  NamedProblem p;
  p.name = "vanderpol";
  p.ivp.dim = 2;
  p.ivp.t_end = 6.3;
  p.ivp.y0 = to_vector({2.0, 0.0});
  p.ivp.field = [](const Vector& y, double t) {
    return to_vector(van_der_pol_field(to_std(y), t));
  };
  p.ivp.jacobian = [](const Vector& y, double) {
    const double mu = 1.0;
    Matrix jac(2, 2);
    jac << 0.0, 1.0,  //
        -2.0 * mu * y(0) * y(1) - mu, mu * (1.0 - y(0) * y(0));
    return jac;
  };
  p.ivp.field_series = [](const JetVector& y, const Jet& t) { return van_der_pol_field(y, t); };
  auto ref = std::make_shared<Rk4Reference>(p.ivp, p.ivp.t_end / kReferenceSteps);
  p.reference = [ref](double t) { return ref->at(t); };
  return p;
}

std::vector<NamedProblem> shipped_problems() {
  std::vector<NamedProblem> out;
  out.push_back(logistic());
  out.push_back(rigid_body());
  out.push_back(van_der_pol());
  return out;
}

NamedProblem problem_by_name(const std::string& name) {
  if (name == "logistic") return logistic();
  if (name == "rigidbody") return rigid_body();
  if (name == "vanderpol") return van_der_pol();
  throw InvalidInputError("unknown problem '" + name +
                          "' (expected logistic, rigidbody or vanderpol)");
}

double rmse(const std::vector<Vector>& means, const std::function<Vector(double)>& reference,
            const std::vector<double>& grid) {
  if (means.size() != grid.size() || means.empty()) {
    throw DimensionError("rmse: means and grid lengths disagree");
  }
  double acc = 0.0;
  std::size_t count = 0;
  for (std::size_t n = 0; n < grid.size(); ++n) {
    const Vector err = means[n] - reference(grid[n]);
    acc += err.squaredNorm();
    count += static_cast<std::size_t>(err.size());
  }
  return std::sqrt(acc / static_cast<double>(count));
}

std::vector<double> uniform_grid(double t_end, int steps) {
  if (steps < 1 || !(t_end > 0.0)) {
    throw InvalidInputError("uniform_grid: need steps >= 1 and t_end > 0");
  }
  std::vector<double> grid(static_cast<std::size_t>(steps) + 1);
  for (int n = 0; n <= steps; ++n) {
    grid[static_cast<std::size_t>(n)] = t_end * static_cast<double>(n) / static_cast<double>(steps);
  }
  return grid;
}

}  // namespace paraode
