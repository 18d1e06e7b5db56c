#pragma once

#include <vector>

#include "paraode/statespace.hpp"

namespace paraode {

// Square-root Kalman prediction:
//   m' = phi m,   P'^(1/2) = tria([phi P^(1/2)  Q^(1/2)]).
GaussianSqrt kf_predict(const GaussianSqrt& state, const TransitionModel& trans);

// Square-root Kalman update against an affine observation.  The gain and
// the updated factor come from one triangularization of
//   [[H P^(1/2)  R^(1/2)]
//    [  P^(1/2)      0  ]]  ->  [[S^(1/2)    0 ]
//                                [ K S^(1/2) P^(1/2)_new ]].
// With R = 0 the updated mean satisfies H m = offset (interpolation).  A
// zero-row observation returns the input unchanged.  Throws
// SingularFactorError when the innovation factor S^(1/2) is singular.
GaussianSqrt kf_update(const GaussianSqrt& pred, const AffineObservation& obs);

// Forward square-root filter over N aligned transitions/observations.
// Returns marginals at all N+1 grid nodes; the node-0 marginal is `init`
// itself (no observation is applied there).
std::vector<GaussianSqrt> kf_forward(const GaussianSqrt& init,
                                     const std::vector<TransitionModel>& transitions,
                                     const std::vector<AffineObservation>& observations);

// Backward Rauch-Tung-Striebel pass in square-root form.  filtered must
// hold the N+1 forward marginals; transitions[n] maps node n to node n+1.
// The gain at node n comes from the triangularization of
//   [[phi P_f^(1/2)  Q^(1/2)]        [[ (phi P_f phi^T + Q)^(1/2)  0 ]
//    [    P_f^(1/2)     0   ]]  ->    [  E_n (...)^(1/2)           L_n^(1/2) ]]
// and the recursion is m_s = m_f + E (m_s' - phi m_f),
// P_s^(1/2) = tria([E P_s'^(1/2)  L^(1/2)]).
std::vector<GaussianSqrt> rts_smooth_pass(const std::vector<GaussianSqrt>& filtered,
                                          const std::vector<TransitionModel>& transitions);

// Filtering plus smoothing marginals for one linear-Gaussian model; shared
// result type of the sequential and scan-based smoothers.
struct ScanStats {
  std::size_t combine_invocations = 0;
  std::size_t sequential_depth = 0;

  void merge_max(const ScanStats& other) {
    combine_invocations = std::max(combine_invocations, other.combine_invocations);
    sequential_depth = std::max(sequential_depth, other.sequential_depth);
  }
};

struct RtsResult {
  std::vector<GaussianSqrt> filtered;  // nodes 0..N
  std::vector<GaussianSqrt> smoothed;  // nodes 0..N
  ScanStats stats;                     // per-scan maxima; zero for the sequential path
};

// Forward filter followed by the backward pass.
RtsResult seq_rts(const GaussianSqrt& init, const std::vector<TransitionModel>& transitions,
                  const std::vector<AffineObservation>& observations);

}  // namespace paraode
