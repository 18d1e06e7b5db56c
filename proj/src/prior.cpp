#include "paraode/prior.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace paraode {

namespace {

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  return factorial(n) / (factorial(k) * factorial(n - k));
}

void check_prior(const IwpPrior& prior) {
  if (prior.nu < 1 || prior.dim < 1) {
    throw InvalidInputError("IwpPrior: need nu >= 1 and dim >= 1");
  }
  if (!(prior.sigma >= 0.0) || !std::isfinite(prior.sigma)) {
    throw InvalidInputError("IwpPrior: sigma must be finite and nonnegative");
  }
}

// Replicate a (nu+1) x (nu+1) block along the diagonal, one copy per
// solution dimension (the Kronecker product I_d (x) block).
Matrix replicate_block(const Matrix& block, int dim) {
  const Eigen::Index b = block.rows();
  Matrix full = Matrix::Zero(b * dim, b * dim);
  for (int r = 0; r < dim; ++r) full.block(r * b, r * b, b, b) = block;
  return full;
}

// Lower-triangular factor of a symmetric PSD block: Cholesky when it
// succeeds, otherwise an eigenvalue-clipped square root retriangularized
// with tria().  The fallback only triggers at step sizes extreme enough
// that the smallest diagonal entries underflow the factorization.
Matrix psd_sqrt(const Matrix& block) {
  Eigen::LLT<Matrix> llt(block);
  if (llt.info() == Eigen::Success) {
    return Matrix(llt.matrixL());
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(block);
  Vector clipped = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return tria(es.eigenvectors() * clipped.asDiagonal());
}

}  // namespace

TransitionModel iwp_transition(const IwpPrior& prior, double h) {
  check_prior(prior);
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw InvalidInputError("iwp_transition: step must be finite and positive");
  }
  const int nu = prior.nu;
  Matrix phi_block = Matrix::Zero(nu + 1, nu + 1);
  Matrix q_block = Matrix::Zero(nu + 1, nu + 1);
  for (int i = 0; i <= nu; ++i) {
    for (int j = i; j <= nu; ++j) {
      phi_block(i, j) = std::pow(h, j - i) / factorial(j - i);
    }
    for (int j = 0; j <= nu; ++j) {
      const int p = 2 * nu + 1 - i - j;
      q_block(i, j) = std::pow(h, p) / (p * factorial(nu - i) * factorial(nu - j));
    }
  }
  TransitionModel trans;
  trans.phi = replicate_block(phi_block, prior.dim);
  trans.q_sqrt = prior.sigma * replicate_block(psd_sqrt(q_block), prior.dim);
  trans.step = h;
  return trans;
}

Preconditioner preconditioner(const IwpPrior& prior, double h) {
  check_prior(prior);
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw InvalidInputError("preconditioner: step must be finite and positive");
  }
  const int nu = prior.nu;
  Preconditioner pc;
  pc.scale = Vector(prior.state_dim());
  pc.scale_inv = Vector(prior.state_dim());
  const double root_h = std::sqrt(h);
  for (int r = 0; r < prior.dim; ++r) {
    for (int i = 0; i <= nu; ++i) {
      const double tau = root_h * std::pow(h, nu - i) / factorial(nu - i);
      pc.scale(r * (nu + 1) + i) = tau;
      pc.scale_inv(r * (nu + 1) + i) = 1.0 / tau;
    }
  }
  return pc;
}

Matrix preconditioned_phi(const IwpPrior& prior) {
  check_prior(prior);
  const int nu = prior.nu;
  Matrix block = Matrix::Zero(nu + 1, nu + 1);
  for (int i = 0; i <= nu; ++i) {
    for (int j = i; j <= nu; ++j) block(i, j) = binomial(nu - i, j - i);
  }
  return replicate_block(block, prior.dim);
}

Matrix preconditioned_q_sqrt(const IwpPrior& prior) {
  check_prior(prior);
  const int nu = prior.nu;
  Matrix block(nu + 1, nu + 1);
  for (int i = 0; i <= nu; ++i) {
    for (int j = 0; j <= nu; ++j) block(i, j) = 1.0 / (2 * nu + 1 - i - j);
  }
  return replicate_block(psd_sqrt(block), prior.dim);
}

GaussianSqrt taylor_init(const InitialValueProblem& ivp, int nu) {
  if (nu < 1) throw InvalidInputError("taylor_init: need nu >= 1");
  if (ivp.dim < 1 || ivp.y0.size() != ivp.dim) {
    throw InvalidInputError("taylor_init: problem dimension and y0 length disagree");
  }
  if (!ivp.field) throw InvalidInputError("taylor_init: problem has no vector field");
  const int d = ivp.dim;

  // Series coefficients of the solution, c[k] = y^(k)(0) / k!, built up one
  // order at a time: the next coefficient is the previous order's field
  // coefficient divided by k+1.
  JetVector y(d, Jet(nu));
  for (int i = 0; i < d; ++i) y[i] = Jet::constant(ivp.y0(i), nu);

  if (ivp.field_series) {
    const Jet t_series = Jet::variable(0.0, nu);
    for (int k = 0; k + 1 <= nu; ++k) {
      JetVector fy = ivp.field_series(y, t_series);
      if (static_cast<int>(fy.size()) != d) {
        throw DimensionError("taylor_init: series field has the wrong output dimension");
      }
      for (int i = 0; i < d; ++i) {
        if (!std::isfinite(fy[i].coeff(k))) {
          throw InvalidInputError("taylor_init: vector field is not finite at the initial point");
        }
        y[i].coeff(k + 1) = fy[i].coeff(k) / (k + 1);
      }
    }
  } else {
    if (nu >= 2) {
      throw InvalidInputError(
          "taylor_init: exact initialization beyond first order needs field_series");
    }
    const Vector fy = ivp.field(ivp.y0, 0.0);
    if (!fy.allFinite()) {
      throw InvalidInputError("taylor_init: vector field is not finite at the initial point");
    }
    for (int i = 0; i < d; ++i) y[i].coeff(1) = fy(i);
  }

  GaussianSqrt init;
  init.mean = Vector(d * (nu + 1));
  double kfact = 1.0;
  for (int k = 0; k <= nu; ++k) {
    if (k > 0) kfact *= k;
    for (int i = 0; i < d; ++i) init.mean(i * (nu + 1) + k) = kfact * y[i].coeff(k);
  }
  init.cov_sqrt = Matrix::Zero(d * (nu + 1), d * (nu + 1));
  return init;
}

}  // namespace paraode
