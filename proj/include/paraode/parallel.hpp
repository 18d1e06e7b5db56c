#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "paraode/sequential.hpp"
#include "paraode/work_pool.hpp"

namespace paraode {

// Per-step element of the associative filtering scan.  It parameterizes
//   f(y | y_prev) = N(y; A y_prev + b, C)      (posterior of one step)
//   g(y_prev)     ~ N_info(y_prev; eta, J)     (likelihood carried backward)
// with C and J in square-root form; j_sqrt is a general (not necessarily
// triangular) square matrix.  The inclusive prefix of elements 1..n yields
// the filtering marginal at node n as N(b, C).
struct FilteringElement {
  Matrix a;
  Vector b;
  Matrix c_sqrt;
  Vector eta;
  Matrix j_sqrt;
};

// Per-node element of the associative smoothing scan:
//   p(y_n | data_1..n, y_n+1) = N(y_n; E y_n+1 + g, L).
// The reverse-cumulative combination from node n to the last node yields
// the smoothing marginal at n as N(g, L).
struct SmoothingElement {
  Matrix e;
  Vector g;
  Matrix l_sqrt;
};

// Element for one interior step: the predecessor carries (m = 0, P = 0), so
// the predicted density is N(phi y_prev, Q), updated against the step's
// observation.  Passing `init` (for the first step) folds the initial
// distribution into the element instead: A, eta and J become zero, and
// (b, C) is the node-1 posterior from a standard predict + update.
FilteringElement make_filtering_element(const TransitionModel& trans,
                                        const AffineObservation& obs,
                                        const GaussianSqrt* init = nullptr);

// Associative combination of two adjacent filtering elements (i before j).
// The shared kernel is the triangularization
//   [[C_i^T/2 J_j^1/2   I]      [[Xi_11    0  ]
//    [J_j^1/2           0]] ->   [Xi_21  Xi_22]],
// whose blocks give  Xi_11 Xi_11^T = I + C_i^1/2T J_j C_i^1/2  and with it
//   A  = A_j (I - C_i^1/2 Xi_11^-T Xi_21^T) A_i
//   b  = A_j (I - C_i^1/2 Xi_11^-T Xi_21^T) (b_i + C_i eta_j) + b_j
//   C^1/2 = tria([A_j C_i^1/2 Xi_11^-T   C_j^1/2])
//   eta = A_i^T (I - Xi_21 Xi_11^-1 C_i^1/2T) (eta_j - J_j b_i) + eta_i
//   J^1/2 = tria([A_i^T Xi_22   J_i^1/2]).
// The identity element is (I, 0, 0, 0, 0).
FilteringElement combine_filtering(const FilteringElement& lhs, const FilteringElement& rhs);

FilteringElement filtering_identity(Eigen::Index state_dim);

// Smoothing element at one node from its filtered marginal and the outgoing
// transition (gain and residual factor as in rts_smooth_pass).  The element
// for the final node is (E = 0, g = m_f, L^1/2 = P_f^1/2).
SmoothingElement make_smoothing_element(const GaussianSqrt& filtered,
                                        const TransitionModel& trans);

SmoothingElement terminal_smoothing_element(const GaussianSqrt& filtered);

// Associative combination of smoothing elements (i before j):
//   E = E_i E_j,  g = E_i g_j + g_i,  L^1/2 = tria([E_i L_j^1/2  L_i^1/2]).
// The identity element is (I, 0, 0).
SmoothingElement combine_smoothing(const SmoothingElement& lhs, const SmoothingElement& rhs);

SmoothingElement smoothing_identity(Eigen::Index state_dim);

enum class ScanDirection { kForward, kReverse };

namespace detail {

// One level of the work-efficient inclusive scan: reduce adjacent pairs,
// scan the half-length array recursively, then splice the prefixes back.
// The combination tree is a function of the element count alone, so the
// result is bitwise independent of the pool width.  `block` is the number
// of original elements each current entry covers (for error messages).
template <typename Elem, typename Op>
void scan_in_place(std::vector<Elem>& x, const Op& op, std::size_t block, std::size_t total,
                   ScanStats& stats, WorkPool& pool) {
  const std::size_t n = x.size();
  if (n < 2) return;

  auto combine = [&](const Elem& lhs, const Elem& rhs, std::size_t lo, std::size_t hi) -> Elem {
    try {
      return op(lhs, rhs);
    } catch (const std::exception& e) {
      throw ScanError("associative_scan: combine failed on elements [" + std::to_string(lo) +
                      ", " + std::to_string(hi) + "]: " + e.what());
    }
  };

  const std::size_t pairs = n / 2;
  std::vector<Elem> reduced(pairs);
  pool.parallel_for(pairs, [&](std::size_t i) {
    const std::size_t lo = 2 * i * block;
    const std::size_t hi = std::min((2 * i + 2) * block, total) - 1;
    reduced[i] = combine(x[2 * i], x[2 * i + 1], lo, hi);
  });
  stats.combine_invocations += pairs;
  stats.sequential_depth += 1;

  scan_in_place(reduced, op, 2 * block, total, stats, pool);

  // Odd positions take the pair prefixes verbatim; even positions (from 2
  // on) combine the preceding pair prefix with their own element.
  const std::size_t fixups = (n + 1) / 2 - 1;
  pool.parallel_for(n, [&](std::size_t p) {
    if (p == 0) return;
    if (p % 2 == 1) {
      x[p] = reduced[p / 2];
    } else {
      const std::size_t hi = std::min((p + 1) * block, total) - 1;
      x[p] = combine(reduced[p / 2 - 1], x[p], 0, hi);
    }
  });
  stats.combine_invocations += fixups;
  if (fixups > 0) stats.sequential_depth += 1;
}

}  // namespace detail

// Inclusive prefix combination of `elems` under an associative operator,
// evaluated on the work-efficient (reduce/downsweep) tree: at most 2N - 2
// combine invocations and 2 ceil(log2 N) dependent levels for N elements.
// kReverse scans right-to-left (suffix combinations, keeping each operand
// pair in time order).  `stats` is accumulated into, never reset.
template <typename Elem, typename Op>
std::vector<Elem> associative_scan(const Op& op, std::vector<Elem> elems, ScanDirection direction,
                                   ScanStats& stats, WorkPool& pool) {
  if (elems.size() < 2) return elems;
  if (direction == ScanDirection::kForward) {
    detail::scan_in_place(elems, op, 1, elems.size(), stats, pool);
    return elems;
  }
  std::reverse(elems.begin(), elems.end());
  auto flipped = [&op](const Elem& lhs, const Elem& rhs) { return op(rhs, lhs); };
  detail::scan_in_place(elems, flipped, 1, elems.size(), stats, pool);
  std::reverse(elems.begin(), elems.end());
  return elems;
}

// Time-parallel square-root filter and smoother: builds per-step elements
// in parallel, runs a forward scan for the filtering marginals and a
// reverse scan for the smoothing marginals.  Output matches seq_rts up to
// rounding; stats holds per-scan maxima over the two scans.
RtsResult para_rts(const GaussianSqrt& init, const std::vector<TransitionModel>& transitions,
                   const std::vector<AffineObservation>& observations, WorkPool& pool);

}  // namespace paraode
