#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "paraode/errors.hpp"

namespace paraode {

// Truncated Taylor series in one variable,
//   c[0] + c[1] t + c[2] t^2 + ... + c[order] t^order,
// with arithmetic truncated at the fixed order.  Sums, differences and
// products are all that the shipped (polynomial) vector fields need; a
// field evaluated on jets yields the exact Taylor coefficients of its
// composition with the trajectory.
class Jet {
 public:
  Jet() = default;
  explicit Jet(int order) : coeffs_(static_cast<std::size_t>(order) + 1, 0.0) {}

  static Jet constant(double value, int order) {
    Jet j(order);
    j.coeffs_[0] = value;
    return j;
  }

  // value + t, the series of the time variable itself.
  static Jet variable(double value, int order) {
    Jet j(order);
    j.coeffs_[0] = value;
    if (order >= 1) j.coeffs_[1] = 1.0;
    return j;
  }

  int order() const { return static_cast<int>(coeffs_.size()) - 1; }
  double coeff(int k) const { return coeffs_[static_cast<std::size_t>(k)]; }
  double& coeff(int k) { return coeffs_[static_cast<std::size_t>(k)]; }

  Jet operator-() const {
    Jet out = *this;
    for (double& c : out.coeffs_) c = -c;
    return out;
  }

  Jet operator+(const Jet& rhs) const {
    Jet out = *this;
    check_same_order(rhs);
    for (std::size_t k = 0; k < coeffs_.size(); ++k) out.coeffs_[k] += rhs.coeffs_[k];
    return out;
  }

  Jet operator-(const Jet& rhs) const {
    Jet out = *this;
    check_same_order(rhs);
    for (std::size_t k = 0; k < coeffs_.size(); ++k) out.coeffs_[k] -= rhs.coeffs_[k];
    return out;
  }

  // Cauchy product truncated at the common order.
  Jet operator*(const Jet& rhs) const {
    check_same_order(rhs);
    Jet out(order());
    for (std::size_t k = 0; k < coeffs_.size(); ++k) {
      double acc = 0.0;
      for (std::size_t i = 0; i <= k; ++i) acc += coeffs_[i] * rhs.coeffs_[k - i];
      out.coeffs_[k] = acc;
    }
    return out;
  }

  Jet operator+(double rhs) const {
    Jet out = *this;
    out.coeffs_[0] += rhs;
    return out;
  }
  Jet operator-(double rhs) const {
    Jet out = *this;
    out.coeffs_[0] -= rhs;
    return out;
  }
  Jet operator*(double rhs) const {
    Jet out = *this;
    for (double& c : out.coeffs_) c *= rhs;
    return out;
  }

  friend Jet operator+(double lhs, const Jet& rhs) { return rhs + lhs; }
  friend Jet operator-(double lhs, const Jet& rhs) { return (-rhs) + lhs; }
  friend Jet operator*(double lhs, const Jet& rhs) { return rhs * lhs; }

 private:
  void check_same_order(const Jet& other) const {
    if (coeffs_.size() != other.coeffs_.size()) {
      throw DimensionError("Jet: mixed truncation orders in one expression");
    }
  }

  std::vector<double> coeffs_;
};

using JetVector = std::vector<Jet>;

}  // namespace paraode
