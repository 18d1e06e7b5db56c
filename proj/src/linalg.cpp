#include "paraode/linalg.hpp"

#include <Eigen/QR>
#include <cmath>
#include <string>

namespace paraode {

Matrix tria(const Matrix& m) {
  if (!m.allFinite()) {
    throw InvalidInputError("tria: input contains non-finite entries");
  }
  const Eigen::Index n = m.rows();
  Matrix r;
  if (m.cols() < n) {
    // Fewer columns than rows: pad with zero columns so the QR below is
    // well posed.  The product is unchanged.
    Matrix padded = Matrix::Zero(n, n);
    padded.leftCols(m.cols()) = m;
    Eigen::HouseholderQR<Matrix> qr(padded.transpose());
    r = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
  } else {
    Eigen::HouseholderQR<Matrix> qr(m.transpose());
    r = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
  }
  return r.transpose();
}

Matrix sqrt_sum(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) {
    throw DimensionError("sqrt_sum: factors must have the same number of rows");
  }
  Matrix stacked(a.rows(), a.cols() + b.cols());
  stacked << a, b;
  return tria(stacked);
}

double whitened_sq_norm(const Vector& v, const Matrix& q_sqrt) {
  if (q_sqrt.rows() != q_sqrt.cols() || q_sqrt.rows() != v.size()) {
    throw DimensionError("whitened_sq_norm: factor must be square and match the vector length");
  }
  if (!v.allFinite() || !q_sqrt.allFinite()) {
    throw InvalidInputError("whitened_sq_norm: non-finite input");
  }
  for (Eigen::Index i = 0; i < q_sqrt.rows(); ++i) {
    if (q_sqrt(i, i) == 0.0) {
      throw SingularFactorError("whitened_sq_norm: factor has a zero diagonal entry");
    }
  }
  Vector w = q_sqrt.triangularView<Eigen::Lower>().solve(v);
  return w.squaredNorm();
}

void require_nonsingular_triangular(const Matrix& t, const char* context) {
  if (t.rows() == 0) return;
  const double largest = t.diagonal().cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < t.rows(); ++i) {
    if (std::abs(t(i, i)) <= 1e-13 * largest) {
      throw SingularFactorError(std::string(context) + ": triangular factor is singular");
    }
  }
}

bool is_lower_triangular(const Matrix& m) {
  for (Eigen::Index j = 1; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < j && i < m.rows(); ++i) {
      if (m(i, j) != 0.0) return false;
    }
  }
  return true;
}

}  // namespace paraode
