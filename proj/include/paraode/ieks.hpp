#pragma once

#include <vector>

#include "paraode/parallel.hpp"
#include "paraode/prior.hpp"

namespace paraode {

// One prior laid out over a time grid, in the rescaled coordinates the
// filters run in.  All inference happens on states scaled per node by
// T(h)^-1 (see Preconditioner); in those coordinates the transition matrix
// is the binomial matrix times a per-step diagonal ratio and the process
// noise factor is one h-independent matrix, which keeps every
// triangularization well conditioned at small steps.
struct DiscretizedPrior {
  IwpPrior prior;
  std::vector<double> times;          // N+1 grid nodes
  std::vector<Vector> node_scale;     // diagonal of T at each node
  std::vector<Vector> node_scale_inv; // its inverse
  std::vector<TransitionModel> transitions;  // N rescaled transitions, sigma applied
  Matrix q_unit_sqrt;                 // rescaled unit-diffusion noise factor (all steps)

  std::size_t steps() const { return transitions.size(); }
};

// Validates the grid (t_0 = 0, strictly increasing) and builds the
// rescaled transitions.
DiscretizedPrior discretize(const IwpPrior& prior, const std::vector<double>& grid);

// Gauss-Newton / smoother configuration and stopping tolerances.
struct IeksConfig {
  int max_iterations = 100;
  double traj_rtol = 1e-13;  // relative trajectory-change tolerance (max norm)
  double obj_atol = 1e-9;    // absolute objective-change tolerance
  double obj_rtol = 1e-6;    // relative objective-change tolerance
  Linearization linearization = Linearization::kEk1;
};

// Half the sum of whitened transition increments,
//   V = 1/2 sum_n || y_n - phi_n-1 y_n-1 ||^2 in the Q_n-1 metric.
// States and transitions must live in the same coordinates; the solver
// evaluates this on rescaled states with unit-diffusion noise factors.
double objective_value(const StateTrajectory& traj,
                       const std::vector<TransitionModel>& transitions);

// True when either the relative trajectory change or the objective change
// is within tolerance:
//   max_n ||dy_n||_inf <= traj_rtol * max_n ||y_n_new||_inf
//   or |V_new - V_prev| <= obj_atol + obj_rtol * |V_new|.
bool stopping_check(const std::vector<Vector>& prev_states,
                    const std::vector<Vector>& new_states, double prev_objective,
                    double new_objective, const IeksConfig& config);

// Sum of squared whitened filter innovations z_n^T S_n^-1 z_n and the
// total innovation dimension, recomputed from the filtered marginals (one
// independent prediction per step, so the parallel path can produce it
// after the scan).
struct InnovationStats {
  double whitened_sq_sum = 0.0;
  std::size_t count = 0;
};

InnovationStats innovation_stats(const GaussianSqrt& init,
                                 const std::vector<TransitionModel>& transitions,
                                 const std::vector<AffineObservation>& observations,
                                 const std::vector<GaussianSqrt>& filtered, WorkPool* pool);

// Quasi-maximum-likelihood diffusion estimate: sigma_hat^2 is the mean
// squared whitened innovation.  Relative to the diffusion the filter ran
// with; posterior means are unaffected, covariance factors are rescaled.
double calibrate_sigma(const InnovationStats& stats);

// Full solver output.  Marginals are smoothing marginals of the final
// iteration with calibrated covariances; solution_* carry the projection
// onto the solution block (derivative 0).
struct SolverReport {
  std::vector<double> times;
  std::vector<GaussianSqrt> marginals;
  std::vector<Vector> solution_means;
  std::vector<Matrix> solution_covs;
  double sigma_hat = 0.0;
  int iterations = 0;
  std::vector<double> objective_trace;  // one entry per iteration
  bool converged = false;
  ScanStats scan_stats;  // per-scan maxima over the whole solve (zero when sequential)
};

// Iterated smoother computing the maximum-a-posteriori solution of the
// IVP: starting from the constant trajectory at the exact initial state,
// relinearize -> smooth -> repeat until stopping_check triggers.
// Non-convergence within max_iterations is reported, not thrown.
// para_ieks runs the scan-based smoother over `pool`; seq_ieks is the same
// loop over the sequential smoother.
SolverReport para_ieks(const InitialValueProblem& ivp, const IwpPrior& prior,
                       const std::vector<double>& grid, const IeksConfig& config, WorkPool& pool);

SolverReport seq_ieks(const InitialValueProblem& ivp, const IwpPrior& prior,
                      const std::vector<double>& grid, const IeksConfig& config);

// Classical extended Kalman smoother baseline: one forward pass with local
// linearization at each predicted mean, one backward pass, calibration.
SolverReport eks_solve(const InitialValueProblem& ivp, const IwpPrior& prior,
                       const std::vector<double>& grid,
                       Linearization linearization = Linearization::kEk1);

}  // namespace paraode
