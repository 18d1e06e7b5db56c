#include "paraode/ieks.hpp"

#include <cmath>
#include <string>

namespace paraode {

DiscretizedPrior discretize(const IwpPrior& prior, const std::vector<double>& grid) {
  if (grid.size() < 2) throw InvalidInputError("discretize: grid needs at least two nodes");
  if (grid.front() != 0.0) throw InvalidInputError("discretize: grid must start at t = 0");
  for (std::size_t n = 0; n + 1 < grid.size(); ++n) {
    if (!(grid[n + 1] > grid[n])) {
      throw InvalidInputError("discretize: grid must be strictly increasing");
    }
  }

  DiscretizedPrior dp;
  dp.prior = prior;
  dp.times = grid;
  const std::size_t steps = grid.size() - 1;

  // Node n is rescaled by T(h) of its incoming step (node 0 uses step 0),
  // so every rescaled noise factor is the same h-free matrix and the
  // rescaled transition is the binomial matrix times a diagonal ratio of
  // consecutive node scales.
  dp.node_scale.resize(grid.size());
  dp.node_scale_inv.resize(grid.size());
  for (std::size_t n = 0; n < grid.size(); ++n) {
    const double h = (n == 0) ? grid[1] - grid[0] : grid[n] - grid[n - 1];
    const Preconditioner pc = preconditioner(prior, h);
    dp.node_scale[n] = pc.scale;
    dp.node_scale_inv[n] = pc.scale_inv;
  }

  dp.q_unit_sqrt = preconditioned_q_sqrt(prior);
  const Matrix phi_unit = preconditioned_phi(prior);
  dp.transitions.resize(steps);
  for (std::size_t n = 0; n < steps; ++n) {
    TransitionModel& t = dp.transitions[n];
    const Vector next_scale_inv = dp.node_scale_inv[n + 1];
    // ratio = T(h_n)^-1 T(h_n-1); identity on uniform grids.
    t.phi = phi_unit * (dp.node_scale[n].cwiseProduct(next_scale_inv)).asDiagonal();
    t.q_sqrt = prior.sigma * dp.q_unit_sqrt;
    t.step = grid[n + 1] - grid[n];
  }
  return dp;
}

double objective_value(const StateTrajectory& traj,
                       const std::vector<TransitionModel>& transitions) {
  if (traj.states.size() != transitions.size() + 1) {
    throw DimensionError("objective_value: need one more state than transitions");
  }
  double acc = 0.0;
  for (std::size_t n = 0; n < transitions.size(); ++n) {
    const Vector increment = traj.states[n + 1] - transitions[n].phi * traj.states[n];
    acc += whitened_sq_norm(increment, transitions[n].q_sqrt);
  }
  return 0.5 * acc;
}

bool stopping_check(const std::vector<Vector>& prev_states,
                    const std::vector<Vector>& new_states, double prev_objective,
                    double new_objective, const IeksConfig& config) {
  if (prev_states.size() != new_states.size()) {
    throw DimensionError("stopping_check: trajectory lengths disagree");
  }
  double max_change = 0.0;
  double max_state = 0.0;
  for (std::size_t n = 0; n < new_states.size(); ++n) {
    max_change = std::max(max_change, (new_states[n] - prev_states[n]).cwiseAbs().maxCoeff());
    max_state = std::max(max_state, new_states[n].cwiseAbs().maxCoeff());
  }
  if (max_change <= config.traj_rtol * max_state) return true;
  return std::abs(new_objective - prev_objective) <=
         config.obj_atol + config.obj_rtol * std::abs(new_objective);
}

InnovationStats innovation_stats(const GaussianSqrt& init,
                                 const std::vector<TransitionModel>& transitions,
                                 const std::vector<AffineObservation>& observations,
                                 const std::vector<GaussianSqrt>& filtered, WorkPool* pool) {
  const std::size_t n = transitions.size();
  if (observations.size() != n || filtered.size() != n + 1) {
    throw DimensionError("innovation_stats: model and marginal counts disagree");
  }
  std::vector<double> per_step(n, 0.0);
  std::vector<std::size_t> per_step_count(n, 0);
  parallel_map(pool, n, [&](std::size_t i) {
    const AffineObservation& obs = observations[i];
    if (obs.h.rows() == 0) return;
    const GaussianSqrt pred = kf_predict(filtered[i], transitions[i]);
    const Matrix s_sqrt = sqrt_sum(obs.h * pred.cov_sqrt, obs.r_sqrt);
    require_nonsingular_triangular(s_sqrt, "innovation_stats: innovation covariance");
    per_step[i] = whitened_sq_norm(obs.h * pred.mean - obs.offset, s_sqrt);
    per_step_count[i] = static_cast<std::size_t>(obs.h.rows());
  });
  InnovationStats stats;
  for (std::size_t i = 0; i < n; ++i) {
    stats.whitened_sq_sum += per_step[i];
    stats.count += per_step_count[i];
  }
  return stats;
}

double calibrate_sigma(const InnovationStats& stats) {
  if (stats.count == 0) throw InvalidInputError("calibrate_sigma: no innovations");
  return std::sqrt(stats.whitened_sq_sum / static_cast<double>(stats.count));
}

namespace {

// Shared driver: pool == nullptr runs the fully sequential variant.
SolverReport ieks_drive(const InitialValueProblem& ivp, const IwpPrior& prior,
                        const std::vector<double>& grid, const IeksConfig& config,
                        WorkPool* pool) {
  if (ivp.dim != prior.dim) {
    throw DimensionError("ieks: problem and prior dimensions disagree");
  }
  if (config.max_iterations < 1) {
    throw InvalidInputError("ieks: max_iterations must be at least 1");
  }
  const DiscretizedPrior dp = discretize(prior, grid);
  const std::size_t steps = dp.steps();
  const Eigen::Index state_dim = prior.state_dim();

  const GaussianSqrt init = taylor_init(ivp, prior.nu);
  GaussianSqrt init_scaled;
  init_scaled.mean = dp.node_scale_inv[0].cwiseProduct(init.mean);
  init_scaled.cov_sqrt = Matrix::Zero(state_dim, state_dim);

  // Unit-diffusion transitions for objective evaluation.
  std::vector<TransitionModel> unit_transitions = dp.transitions;
  for (TransitionModel& t : unit_transitions) t.q_sqrt = dp.q_unit_sqrt;

  auto scaled_objective = [&](const std::vector<Vector>& states) {
    StateTrajectory scaled;
    scaled.times = dp.times;
    scaled.states.resize(states.size());
    for (std::size_t n = 0; n < states.size(); ++n) {
      scaled.states[n] = dp.node_scale_inv[n].cwiseProduct(states[n]);
    }
    return objective_value(scaled, unit_transitions);
  };

  // Constant initial trajectory at the exact initial state.
  std::vector<Vector> eta(steps + 1, init.mean);
  double prev_objective = scaled_objective(eta);

  SolverReport report;
  report.times = dp.times;
  report.converged = false;

  std::vector<AffineObservation> observations(steps);
  RtsResult rts;
  int iteration = 0;
  while (iteration < config.max_iterations) {
    ++iteration;
    try {
      parallel_map(pool, steps, [&](std::size_t i) {
        AffineObservation obs = linearize(ivp, eta[i + 1], dp.times[i + 1], config.linearization);
        obs.h = obs.h * dp.node_scale[i + 1].asDiagonal();  // into rescaled coordinates
        observations[i] = std::move(obs);
      });
    } catch (const LinearizationError& e) {
      throw LinearizationError(
          "ieks iteration " + std::to_string(iteration) + ": " + e.what(), e.time(), e.index());
    }

    rts = pool ? para_rts(init_scaled, dp.transitions, observations, *pool)
               : seq_rts(init_scaled, dp.transitions, observations);
    report.scan_stats.merge_max(rts.stats);

    std::vector<Vector> new_eta(steps + 1);
    for (std::size_t n = 0; n <= steps; ++n) {
      new_eta[n] = dp.node_scale[n].cwiseProduct(rts.smoothed[n].mean);
    }
    const double objective = scaled_objective(new_eta);
    report.objective_trace.push_back(objective);
    const bool converged = stopping_check(eta, new_eta, prev_objective, objective, config);
    eta = std::move(new_eta);
    prev_objective = objective;
    if (converged) {
      report.converged = true;
      break;
    }
  }
  report.iterations = iteration;

  // Diffusion calibration from the final pass' innovations; means are
  // unaffected, covariance factors pick up the relative factor.
  const InnovationStats stats =
      innovation_stats(init_scaled, dp.transitions, observations, rts.filtered, pool);
  const double sigma_rel = calibrate_sigma(stats);
  report.sigma_hat = sigma_rel * prior.sigma;

  report.marginals.resize(steps + 1);
  report.solution_means.resize(steps + 1);
  report.solution_covs.resize(steps + 1);
  const Matrix e0 = projection_matrix(prior.dim, prior.nu, 0);
  parallel_map(pool, steps + 1, [&](std::size_t n) {
    GaussianSqrt& out = report.marginals[n];
    out.mean = dp.node_scale[n].cwiseProduct(rts.smoothed[n].mean);
    out.cov_sqrt = dp.node_scale[n].asDiagonal() * rts.smoothed[n].cov_sqrt * sigma_rel;
    report.solution_means[n] = e0 * out.mean;
    const Matrix projected = e0 * out.cov_sqrt;
    report.solution_covs[n] = projected * projected.transpose();
  });
  return report;
}

}  // namespace

SolverReport para_ieks(const InitialValueProblem& ivp, const IwpPrior& prior,
                       const std::vector<double>& grid, const IeksConfig& config, WorkPool& pool) {
  return ieks_drive(ivp, prior, grid, config, &pool);
}

SolverReport seq_ieks(const InitialValueProblem& ivp, const IwpPrior& prior,
                      const std::vector<double>& grid, const IeksConfig& config) {
  return ieks_drive(ivp, prior, grid, config, nullptr);
}

SolverReport eks_solve(const InitialValueProblem& ivp, const IwpPrior& prior,
                       const std::vector<double>& grid, Linearization linearization) {
  if (ivp.dim != prior.dim) {
    throw DimensionError("eks_solve: problem and prior dimensions disagree");
  }
  const DiscretizedPrior dp = discretize(prior, grid);
  const std::size_t steps = dp.steps();
  const Eigen::Index state_dim = prior.state_dim();

  const GaussianSqrt init = taylor_init(ivp, prior.nu);
  GaussianSqrt init_scaled{dp.node_scale_inv[0].cwiseProduct(init.mean),
                           Matrix::Zero(state_dim, state_dim)};

  // Forward pass, linearizing each step at its own predicted mean.
  std::vector<GaussianSqrt> filtered(steps + 1);
  std::vector<AffineObservation> observations(steps);
  filtered[0] = init_scaled;
  for (std::size_t n = 0; n < steps; ++n) {
    const GaussianSqrt pred = kf_predict(filtered[n], dp.transitions[n]);
    const Vector eta = dp.node_scale[n + 1].cwiseProduct(pred.mean);
    AffineObservation obs;
    try {
      obs = linearize(ivp, eta, dp.times[n + 1], linearization);
    } catch (const LinearizationError& e) {
      throw LinearizationError("eks_solve: " + std::string(e.what()), e.time(), n + 1);
    }
    obs.h = obs.h * dp.node_scale[n + 1].asDiagonal();
    observations[n] = std::move(obs);
    filtered[n + 1] = kf_update(pred, observations[n]);
  }
  const std::vector<GaussianSqrt> smoothed = rts_smooth_pass(filtered, dp.transitions);

  const InnovationStats stats =
      innovation_stats(init_scaled, dp.transitions, observations, filtered, nullptr);
  const double sigma_rel = calibrate_sigma(stats);

  SolverReport report;
  report.times = dp.times;
  report.sigma_hat = sigma_rel * prior.sigma;
  report.iterations = 1;
  report.converged = true;

  report.marginals.resize(steps + 1);
  report.solution_means.resize(steps + 1);
  report.solution_covs.resize(steps + 1);
  const Matrix e0 = projection_matrix(prior.dim, prior.nu, 0);
  std::vector<Vector> means(steps + 1);
  for (std::size_t n = 0; n <= steps; ++n) {
    GaussianSqrt& out = report.marginals[n];
    out.mean = dp.node_scale[n].cwiseProduct(smoothed[n].mean);
    out.cov_sqrt = dp.node_scale[n].asDiagonal() * smoothed[n].cov_sqrt * sigma_rel;
    report.solution_means[n] = e0 * out.mean;
    const Matrix projected = e0 * out.cov_sqrt;
    report.solution_covs[n] = projected * projected.transpose();
    means[n] = out.mean;
  }

  std::vector<TransitionModel> unit_transitions = dp.transitions;
  for (TransitionModel& t : unit_transitions) t.q_sqrt = dp.q_unit_sqrt;
  StateTrajectory scaled;
  scaled.times = dp.times;
  scaled.states.resize(means.size());
  for (std::size_t n = 0; n < means.size(); ++n) {
    scaled.states[n] = dp.node_scale_inv[n].cwiseProduct(means[n]);
  }
  report.objective_trace.push_back(objective_value(scaled, unit_transitions));
  return report;
}

}  // namespace paraode
