#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "matchq/errors.hpp"
#include "matchq/linalg.hpp"
#include "matchq/queue_model.hpp"

namespace matchq {

/// Closed-form stationary distribution of the scalar (order-1 inputs) model,
/// used as an independent verification backend. Product-form probabilities
/// over levels -K..K with up-rate lambda1 / down-rate lambda2 + k*theta1 above
/// the boundary and the mirrored rates below.
struct BirthDeathSolution {
  int half_range = 0;            // K
  std::vector<double> p;         // levels -K..K
  double normalizer = 0.0;       // sum of unnormalized weights

  double p_at(std::int64_t k) const {
    return p[static_cast<std::size_t>(k + half_range)];
  }
  double mean_level() const {
    double s = 0.0;
    for (int k = -half_range; k <= half_range; ++k)
      s += static_cast<double>(k) * p_at(k);
    return s;
  }
};

inline BirthDeathSolution birth_death_solve(double lambda1, double lambda2,
                                            double theta1, double theta2, int half_range) {
  if (!(theta1 > 0.0) || !(theta2 > 0.0))
    throw ConfigError("birth_death_solve: impatience rates must be positive");
  if (half_range < 1) throw ConfigError("birth_death_solve: range too small");

  const int K = half_range;
  std::vector<double> w(2 * static_cast<std::size_t>(K) + 1, 0.0);
  auto at = [&](std::int64_t k) -> double& {
    return w[static_cast<std::size_t>(k + K)];
  };
  at(0) = 1.0;
  for (std::int64_t k = 0; k < K; ++k) {
    const double up = lambda1;  // up-rate out of level k >= 0
    const double down = lambda2 + static_cast<double>(k + 1) * theta1;
    at(k + 1) = at(k) * up / down;
  }
  for (std::int64_t k = 0; k > -K; --k) {
    const double down = lambda2;  // down-rate out of level k <= 0
    const double up = lambda1 + static_cast<double>(-(k - 1)) * theta2;
    at(k - 1) = at(k) * down / up;
  }
  double total = 0.0;
  for (double v : w) total += v;
  BirthDeathSolution sol;
  sol.half_range = K;
  sol.normalizer = total;
  sol.p.resize(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) sol.p[i] = w[i] / total;
  if (sol.p.front() >= 1e-16 || sol.p.back() >= 1e-16)
    throw ConfigError("birth_death_solve: range too small, boundary mass " +
                      std::to_string(std::max(sol.p.front(), sol.p.back())));
  return sol;
}

/// Brute-force verification backend for any model: assembles the full
/// truncated generator over levels -K..K, reflects the outermost up/down
/// flows into their local blocks so the matrix stays a proper generator, and
/// solves the global balance equations directly.
inline std::vector<Vector> direct_truncated_solve(const QueueModel& model, int half_range) {
  const int K = half_range;
  const std::size_t n = model.block_order();
  const std::size_t total = (2 * static_cast<std::size_t>(K) + 1) * n;
  Matrix q(total, total);
  auto base = [&](std::int64_t k) { return static_cast<std::size_t>(k + K) * n; };
  for (std::int64_t k = -K; k <= K; ++k) {
    LevelBlocks blk = model.blocks_at(k);
    if (k < K) {
      const std::size_t r0 = base(k), c0 = base(k + 1);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) q(r0 + i, c0 + j) = blk.up(i, j);
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += blk.up(i, j);
        blk.local(i, i) += s;
      }
    }
    if (k > -K) {
      const std::size_t r0 = base(k), c0 = base(k - 1);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) q(r0 + i, c0 + j) = blk.down(i, j);
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += blk.down(i, j);
        blk.local(i, i) += s;
      }
    }
    const std::size_t r0 = base(k);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) q(r0 + i, r0 + j) = blk.local(i, j);
  }

  Matrix a = q.transposed();
  for (std::size_t j = 0; j < total; ++j) a(total - 1, j) = 1.0;
  Vector rhs(total);
  rhs[total - 1] = 1.0;
  const Vector x = solve_linear(a, rhs);

  std::vector<Vector> levels(2 * static_cast<std::size_t>(K) + 1, Vector(n));
  for (std::int64_t k = -K; k <= K; ++k)
    for (std::size_t i = 0; i < n; ++i)
      levels[static_cast<std::size_t>(k + K)][i] = x[base(k) + i];
  return levels;
}

}  // namespace matchq
