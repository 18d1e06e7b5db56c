#include "paraode/parallel.hpp"

namespace paraode {

FilteringElement make_filtering_element(const TransitionModel& trans,
                                        const AffineObservation& obs,
                                        const GaussianSqrt* init) {
  const Eigen::Index d = trans.phi.rows();
  if (trans.phi.cols() != d || trans.q_sqrt.rows() != d || obs.h.cols() != d) {
    throw DimensionError("make_filtering_element: model dimensions disagree");
  }

  if (init != nullptr) {
    // First step: absorb the initial distribution, so the element is the
    // plain node-1 posterior and carries no dependence on its predecessor.
    const GaussianSqrt posterior = kf_update(kf_predict(*init, trans), obs);
    FilteringElement el;
    el.a = Matrix::Zero(d, d);
    el.b = posterior.mean;
    el.c_sqrt = posterior.cov_sqrt;
    el.eta = Vector::Zero(d);
    el.j_sqrt = Matrix::Zero(d, d);
    return el;
  }

  const Eigen::Index m = obs.h.rows();
  if (m == 0) {
    // Vacuous observation: the element is the prediction itself.
    FilteringElement el;
    el.a = trans.phi;
    el.b = Vector::Zero(d);
    el.c_sqrt = trans.q_sqrt;
    el.eta = Vector::Zero(d);
    el.j_sqrt = Matrix::Zero(d, d);
    return el;
  }

  // Interior step: predecessor carries (m = 0, P = 0), hence the predicted
  // density is N(phi y_prev, Q) with factor Q^1/2 as-is.
  Matrix stacked = Matrix::Zero(m + d, d + obs.r_sqrt.cols());
  stacked.topLeftCorner(m, d) = obs.h * trans.q_sqrt;
  stacked.topRightCorner(m, obs.r_sqrt.cols()) = obs.r_sqrt;
  stacked.bottomLeftCorner(d, d) = trans.q_sqrt;
  const Matrix psi = tria(stacked);

  const Matrix s_sqrt = psi.topLeftCorner(m, m);
  require_nonsingular_triangular(s_sqrt, "make_filtering_element: innovation covariance");
  const Matrix gain = s_sqrt.transpose()
                          .triangularView<Eigen::Upper>()
                          .solve(psi.bottomLeftCorner(d, m).transpose())
                          .transpose();

  FilteringElement el;
  el.a = trans.phi - gain * (obs.h * trans.phi);  // (I - K H) phi
  el.b = gain * obs.offset;                       // m- = 0
  el.c_sqrt = psi.bottomRightCorner(d, d);
  // J^1/2 = phi^T H^T S^-T/2 = (S^-1/2 H phi)^T, zero-padded to d columns so
  // every element carries square factors; eta = J^1/2 S^-1/2 offset.
  const Matrix scaled_h =
      s_sqrt.triangularView<Eigen::Lower>().solve(Matrix(obs.h * trans.phi));
  el.j_sqrt = Matrix::Zero(d, d);
  el.j_sqrt.leftCols(m) = scaled_h.transpose();
  el.eta = scaled_h.transpose() * s_sqrt.triangularView<Eigen::Lower>().solve(obs.offset);
  return el;
}

FilteringElement combine_filtering(const FilteringElement& lhs, const FilteringElement& rhs) {
  const Eigen::Index d = lhs.a.rows();
  if (rhs.a.rows() != d || lhs.c_sqrt.rows() != d || rhs.j_sqrt.rows() != d ||
      lhs.c_sqrt.cols() != d || rhs.j_sqrt.cols() != d || lhs.j_sqrt.cols() != d ||
      rhs.c_sqrt.cols() != d) {
    throw DimensionError("combine_filtering: element factors must be square");
  }

  Matrix stacked = Matrix::Zero(2 * d, 2 * d);
  stacked.topLeftCorner(d, d) = lhs.c_sqrt.transpose() * rhs.j_sqrt;
  stacked.topRightCorner(d, d) = Matrix::Identity(d, d);
  stacked.bottomLeftCorner(d, d) = rhs.j_sqrt;
  const Matrix xi = tria(stacked);

  const Matrix xi11 = xi.topLeftCorner(d, d);  // Xi_11 Xi_11^T = I + C_i^1/2T J_j C_i^1/2 >= I
  require_nonsingular_triangular(xi11, "combine_filtering: combination factor");
  const Matrix xi21 = xi.bottomLeftCorner(d, d);
  const Matrix xi22 = xi.bottomRightCorner(d, d);

  // W = C_i^1/2 Xi_11^-T, so that G = I - W Xi_21^T = (I + C_i J_j)^-1.
  const Matrix w =
      xi11.triangularView<Eigen::Lower>().solve(lhs.c_sqrt.transpose()).transpose();
  const Matrix g = Matrix::Identity(d, d) - w * xi21.transpose();

  FilteringElement out;
  out.a = rhs.a * g * lhs.a;
  out.b = rhs.a * g * (lhs.b + lhs.c_sqrt * (lhs.c_sqrt.transpose() * rhs.eta)) + rhs.b;
  out.c_sqrt = sqrt_sum(rhs.a * w, rhs.c_sqrt);
  out.eta =
      lhs.a.transpose() * g.transpose() * (rhs.eta - rhs.j_sqrt * (rhs.j_sqrt.transpose() * lhs.b)) +
      lhs.eta;
  out.j_sqrt = sqrt_sum(lhs.a.transpose() * xi22, lhs.j_sqrt);
  return out;
}

FilteringElement filtering_identity(Eigen::Index state_dim) {
  FilteringElement el;
  el.a = Matrix::Identity(state_dim, state_dim);
  el.b = Vector::Zero(state_dim);
  el.c_sqrt = Matrix::Zero(state_dim, state_dim);
  el.eta = Vector::Zero(state_dim);
  el.j_sqrt = Matrix::Zero(state_dim, state_dim);
  return el;
}

SmoothingElement make_smoothing_element(const GaussianSqrt& filtered,
                                        const TransitionModel& trans) {
  const Eigen::Index d = filtered.mean.size();
  if (trans.phi.rows() != d || trans.phi.cols() != d || trans.q_sqrt.rows() != d) {
    throw DimensionError("make_smoothing_element: model dimensions disagree");
  }
  Matrix stacked = Matrix::Zero(2 * d, 2 * d);
  stacked.topLeftCorner(d, d) = trans.phi * filtered.cov_sqrt;
  stacked.topRightCorner(d, d) = trans.q_sqrt;
  stacked.bottomLeftCorner(d, d) = filtered.cov_sqrt;
  const Matrix pi = tria(stacked);

  const Matrix pred_sqrt = pi.topLeftCorner(d, d);
  require_nonsingular_triangular(pred_sqrt, "make_smoothing_element: predicted covariance");

  SmoothingElement el;
  el.e = pred_sqrt.transpose()
             .triangularView<Eigen::Upper>()
             .solve(pi.bottomLeftCorner(d, d).transpose())
             .transpose();
  el.g = filtered.mean - el.e * (trans.phi * filtered.mean);
  el.l_sqrt = pi.bottomRightCorner(d, d);
  return el;
}

SmoothingElement terminal_smoothing_element(const GaussianSqrt& filtered) {
  const Eigen::Index d = filtered.mean.size();
  SmoothingElement el;
  el.e = Matrix::Zero(d, d);
  el.g = filtered.mean;
  el.l_sqrt = filtered.cov_sqrt;
  return el;
}

SmoothingElement combine_smoothing(const SmoothingElement& lhs, const SmoothingElement& rhs) {
  const Eigen::Index d = lhs.e.rows();
  if (rhs.e.rows() != d) {
    throw DimensionError("combine_smoothing: element dimensions disagree");
  }
  SmoothingElement out;
  out.e = lhs.e * rhs.e;
  out.g = lhs.e * rhs.g + lhs.g;
  out.l_sqrt = sqrt_sum(lhs.e * rhs.l_sqrt, lhs.l_sqrt);
  return out;
}

SmoothingElement smoothing_identity(Eigen::Index state_dim) {
  SmoothingElement el;
  el.e = Matrix::Identity(state_dim, state_dim);
  el.g = Vector::Zero(state_dim);
  el.l_sqrt = Matrix::Zero(state_dim, state_dim);
  return el;
}

RtsResult para_rts(const GaussianSqrt& init, const std::vector<TransitionModel>& transitions,
                   const std::vector<AffineObservation>& observations, WorkPool& pool) {
  if (transitions.empty() || transitions.size() != observations.size()) {
    throw DimensionError("para_rts: need N >= 1 aligned transitions and observations");
  }
  const std::size_t n = transitions.size();

  std::vector<FilteringElement> filter_elements(n);
  pool.parallel_for(n, [&](std::size_t i) {
    filter_elements[i] =
        make_filtering_element(transitions[i], observations[i], i == 0 ? &init : nullptr);
  });

  ScanStats forward_stats;
  const std::vector<FilteringElement> prefixes = associative_scan(
      combine_filtering, std::move(filter_elements), ScanDirection::kForward, forward_stats, pool);

  RtsResult out;
  out.filtered.resize(n + 1);
  out.filtered[0] = init;
  pool.parallel_for(n, [&](std::size_t i) {
    out.filtered[i + 1] = GaussianSqrt{prefixes[i].b, prefixes[i].c_sqrt};
  });

  std::vector<SmoothingElement> smooth_elements(n + 1);
  pool.parallel_for(n + 1, [&](std::size_t i) {
    smooth_elements[i] = (i == n) ? terminal_smoothing_element(out.filtered[n])
                                  : make_smoothing_element(out.filtered[i], transitions[i]);
  });

  ScanStats reverse_stats;
  const std::vector<SmoothingElement> suffixes =
      associative_scan(combine_smoothing, std::move(smooth_elements), ScanDirection::kReverse,
                       reverse_stats, pool);

  out.smoothed.resize(n + 1);
  pool.parallel_for(n + 1, [&](std::size_t i) {
    out.smoothed[i] = GaussianSqrt{suffixes[i].g, suffixes[i].l_sqrt};
  });

  out.stats = forward_stats;
  out.stats.merge_max(reverse_stats);
  return out;
}

}  // namespace paraode
