#pragma once

#include <Eigen/Dense>

#include "paraode/errors.hpp"

namespace paraode {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// All covariance matrices in this library are carried around in square-root
// form: a matrix L with L L^T equal to the covariance.  Factors produced by
// tria() are lower triangular with exact zeros above the diagonal, but no
// sign convention is imposed on the columns -- two factors of the same
// matrix may differ by column signs, so equality of covariances is always
// checked in product form L L^T.

// Lower-triangular factor of M M^T, computed from the thin QR decomposition
// of M^T.  M must have at least as many columns as rows; a wider-than-tall
// M is accepted as-is, and an M with fewer columns than rows is zero-padded
// on the right (its product M M^T is rank deficient but well defined).
Matrix tria(const Matrix& m);

// Lower-triangular factor of A A^T + B B^T, i.e. tria([A B]).  A and B must
// have the same number of rows.
Matrix sqrt_sum(const Matrix& a, const Matrix& b);

// ||v||^2 in the metric induced by Q = q_sqrt q_sqrt^T: the squared norm of
// the triangular solve q_sqrt w = v.  q_sqrt must be square, lower
// triangular and nonsingular.
double whitened_sq_norm(const Vector& v, const Matrix& q_sqrt);

// True iff every entry above the diagonal is exactly zero.
bool is_lower_triangular(const Matrix& m);

// Throws SingularFactorError (message prefixed with `context`) when a
// diagonal entry of the triangular factor is zero to machine precision
// relative to the largest diagonal entry.
void require_nonsingular_triangular(const Matrix& t, const char* context);

}  // namespace paraode
