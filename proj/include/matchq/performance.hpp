#pragma once

#include <algorithm>
#include <cstdint>

#include "matchq/qbd_solver.hpp"

namespace matchq {

/// Stationary performance measures of the matched queue. All sums run over
/// the truncated level range; the truncation error is bounded by
/// tail_mass * (k_star + 1) and reported alongside.
struct PerformanceReport {
  double p_no_a = 0.0;    // P{side-A queue empty}  (level <= 0)
  double p_no_b = 0.0;    // P{side-B queue empty}  (level >= 0)
  double p_empty = 0.0;   // P{both empty}          (level == 0)
  double mean_q_a = 0.0;  // E[side-A queue length]
  double mean_q_b = 0.0;  // E[side-B queue length]
  /// Composite mean: each side's mean weighted by that side's busy
  /// probability, mean_q_a*(1-p_no_a) + mean_q_b*(1-p_no_b).
  double mean_q_composite = 0.0;
  double mean_q_total_abs = 0.0;   // E[|level|] = mean_q_a + mean_q_b
  double mean_level_diff = 0.0;    // E[level], signed
  int k_star = 0;
  double tail_mass = 0.0;
  double truncation_error_bound = 0.0;
};

/// Builds the report from a truncated stationary solution. Entries are
/// clamped at zero so roundoff-negative components cannot leak into the
/// probabilities.
inline PerformanceReport report(const TruncatedStationarySolution& sol) {
  PerformanceReport r;
  r.k_star = sol.k_star;
  r.tail_mass = sol.tail_mass;
  r.truncation_error_bound = sol.tail_mass * (sol.k_star + 1);

  auto level_mass = [&](std::int64_t k) {
    double s = 0.0;
    const Vector& v = sol.pi_at(k);
    for (std::size_t i = 0; i < v.size(); ++i) s += std::max(v[i], 0.0);
    return s;
  };

  for (std::int64_t k = -sol.k_star - 1; k <= sol.k_star + 1; ++k) {
    const double mass = level_mass(k);
    if (k <= 0) r.p_no_a += mass;
    if (k >= 0) r.p_no_b += mass;
    if (k == 0) r.p_empty = mass;
    if (k >= 1) r.mean_q_a += static_cast<double>(k) * mass;
    if (k <= -1) r.mean_q_b += static_cast<double>(-k) * mass;
  }
  r.mean_q_composite = r.mean_q_a * (1.0 - r.p_no_a) + r.mean_q_b * (1.0 - r.p_no_b);
  r.mean_q_total_abs = r.mean_q_a + r.mean_q_b;
  r.mean_level_diff = r.mean_q_a - r.mean_q_b;
  return r;
}

}  // namespace matchq
