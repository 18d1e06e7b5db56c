#pragma once

#include "paraode/statespace.hpp"

namespace paraode {

// nu-times integrated Wiener process prior over a d-dimensional solution,
// modelling the solution and its first nu derivatives per dimension (full
// state dimension d * (nu + 1)).  sigma is the scalar diffusion; posterior
// means do not depend on it and it is usually left at 1 and calibrated
// after the fact.
struct IwpPrior {
  int nu = 1;
  int dim = 1;
  double sigma = 1.0;

  int state_dim() const { return dim * (nu + 1); }
};

// Exact discrete-time transition of the integrated Wiener process over a
// step h > 0.  Per derivative block (indices i, j in 0..nu):
//   phi_ij = h^(j-i) / (j-i)!                          for j >= i, else 0
//   q_ij   = h^(2nu+1-i-j) / ((2nu+1-i-j) (nu-i)! (nu-j)!)
// replicated over the d solution dimensions.  q_sqrt is sigma times a
// lower-triangular factor of the block.
TransitionModel iwp_transition(const IwpPrior& prior, double h);

// Step-size rescaling T(h) = diag(sqrt(h) h^(nu-i) / (nu-i)!) per block,
// stored as the diagonal (and its inverse) of the full state-space matrix.
// T(h)^-1 phi(h) T(h) and T(h)^-1 q(h) T(h)^-T are independent of h, which
// keeps the filter arithmetic well scaled for small steps.
struct Preconditioner {
  Vector scale;      // diagonal of T(h)
  Vector scale_inv;  // diagonal of T(h)^-1
};

Preconditioner preconditioner(const IwpPrior& prior, double h);

// The h-independent preconditioned transition pair: phi_bar = T^-1 phi T
// (the binomial/Pascal matrix per block) and a lower-triangular factor of
// q_bar = T^-1 q T^-T / sigma^2 (whose block entries are 1/(2nu+1-i-j)).
Matrix preconditioned_phi(const IwpPrior& prior);
Matrix preconditioned_q_sqrt(const IwpPrior& prior);

// Exact initial state from the truncated Taylor expansion of the solution
// at t = 0: mean stacks y(0), y'(0), ..., y^(nu)(0) per dimension, computed
// by evaluating the field on series (derivatives 0 and 1 need only the
// plain field; higher orders require ivp.field_series).  The covariance is
// exactly zero.
GaussianSqrt taylor_init(const InitialValueProblem& ivp, int nu);

}  // namespace paraode
