#include "paraode/sequential.hpp"

namespace paraode {

namespace {

void check_aligned(const GaussianSqrt& init, const std::vector<TransitionModel>& transitions,
                   const std::vector<AffineObservation>& observations) {
  if (transitions.empty() || transitions.size() != observations.size()) {
    throw DimensionError("smoother: need N >= 1 aligned transitions and observations");
  }
  const Eigen::Index d = init.mean.size();
  if (init.cov_sqrt.rows() != d || init.cov_sqrt.cols() != d) {
    throw DimensionError("smoother: initial covariance factor must be square and match the mean");
  }
  for (const TransitionModel& t : transitions) {
    if (t.phi.rows() != d || t.phi.cols() != d || t.q_sqrt.rows() != d) {
      throw DimensionError("smoother: transition dimensions disagree with the state");
    }
  }
  for (const AffineObservation& o : observations) {
    if (o.h.cols() != d || o.h.rows() != o.offset.size()) {
      throw DimensionError("smoother: observation dimensions disagree with the state");
    }
  }
}

}  // namespace

GaussianSqrt kf_predict(const GaussianSqrt& state, const TransitionModel& trans) {
  const Eigen::Index d = state.mean.size();
  if (trans.phi.rows() != d || trans.phi.cols() != d || trans.q_sqrt.rows() != d) {
    throw DimensionError("kf_predict: transition dimensions disagree with the state");
  }
  GaussianSqrt pred;
  pred.mean = trans.phi * state.mean;
  pred.cov_sqrt = sqrt_sum(trans.phi * state.cov_sqrt, trans.q_sqrt);
  return pred;
}

GaussianSqrt kf_update(const GaussianSqrt& pred, const AffineObservation& obs) {
  const Eigen::Index d = pred.mean.size();
  const Eigen::Index m = obs.h.rows();
  if (obs.h.cols() != d || obs.offset.size() != m || obs.r_sqrt.rows() != m) {
    throw DimensionError("kf_update: observation dimensions disagree with the state");
  }
  if (m == 0) return pred;

  Matrix stacked = Matrix::Zero(m + d, d + obs.r_sqrt.cols());
  stacked.topLeftCorner(m, d) = obs.h * pred.cov_sqrt;
  stacked.topRightCorner(m, obs.r_sqrt.cols()) = obs.r_sqrt;
  stacked.bottomLeftCorner(d, d) = pred.cov_sqrt;
  const Matrix psi = tria(stacked);

  const Matrix s_sqrt = psi.topLeftCorner(m, m);
  require_nonsingular_triangular(s_sqrt, "kf_update: innovation covariance");
  // K = psi_21 psi_11^-1, solved as psi_11^T K^T = psi_21^T.
  const Matrix gain = s_sqrt.transpose()
                          .triangularView<Eigen::Upper>()
                          .solve(psi.bottomLeftCorner(d, m).transpose())
                          .transpose();

  GaussianSqrt updated;
  updated.mean = pred.mean - gain * (obs.h * pred.mean - obs.offset);
  updated.cov_sqrt = psi.bottomRightCorner(d, d);
  return updated;
}

std::vector<GaussianSqrt> kf_forward(const GaussianSqrt& init,
                                     const std::vector<TransitionModel>& transitions,
                                     const std::vector<AffineObservation>& observations) {
  check_aligned(init, transitions, observations);
  std::vector<GaussianSqrt> marginals(transitions.size() + 1);
  marginals[0] = init;
  for (std::size_t n = 0; n < transitions.size(); ++n) {
    marginals[n + 1] = kf_update(kf_predict(marginals[n], transitions[n]), observations[n]);
  }
  return marginals;
}

namespace {

// Smoothing gain, offset and residual covariance factor at one node.
struct SmootherGain {
  Matrix gain;
  Matrix residual_sqrt;
};

SmootherGain smoother_gain(const GaussianSqrt& filtered, const TransitionModel& trans) {
  const Eigen::Index d = filtered.mean.size();
  Matrix stacked = Matrix::Zero(2 * d, 2 * d);
  stacked.topLeftCorner(d, d) = trans.phi * filtered.cov_sqrt;
  stacked.topRightCorner(d, d) = trans.q_sqrt;
  stacked.bottomLeftCorner(d, d) = filtered.cov_sqrt;
  const Matrix pi = tria(stacked);
  const Matrix pred_sqrt = pi.topLeftCorner(d, d);
  require_nonsingular_triangular(pred_sqrt, "rts_smooth_pass: predicted covariance");
  SmootherGain out;
  out.gain = pred_sqrt.transpose()
                 .triangularView<Eigen::Upper>()
                 .solve(pi.bottomLeftCorner(d, d).transpose())
                 .transpose();
  out.residual_sqrt = pi.bottomRightCorner(d, d);
  return out;
}

}  // namespace

std::vector<GaussianSqrt> rts_smooth_pass(const std::vector<GaussianSqrt>& filtered,
                                          const std::vector<TransitionModel>& transitions) {
  if (filtered.size() != transitions.size() + 1 || transitions.empty()) {
    throw DimensionError("rts_smooth_pass: need N+1 filtered marginals for N >= 1 transitions");
  }
  std::vector<GaussianSqrt> smoothed(filtered.size());
  smoothed.back() = filtered.back();
  for (std::size_t n = transitions.size(); n-- > 0;) {
    const SmootherGain sg = smoother_gain(filtered[n], transitions[n]);
    GaussianSqrt& out = smoothed[n];
    out.mean = filtered[n].mean +
               sg.gain * (smoothed[n + 1].mean - transitions[n].phi * filtered[n].mean);
    out.cov_sqrt = sqrt_sum(sg.gain * smoothed[n + 1].cov_sqrt, sg.residual_sqrt);
  }
  return smoothed;
}

RtsResult seq_rts(const GaussianSqrt& init, const std::vector<TransitionModel>& transitions,
                  const std::vector<AffineObservation>& observations) {
  RtsResult out;
  out.filtered = kf_forward(init, transitions, observations);
  out.smoothed = rts_smooth_pass(out.filtered, transitions);
  return out;
}

}  // namespace paraode
