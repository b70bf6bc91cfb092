#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "matchq/errors.hpp"
#include "matchq/linalg.hpp"
#include "matchq/qbd_solver.hpp"

namespace matchq {

/// Phase-type upper bound on the sojourn time of a side-A customer: the first
/// passage time of the level process to <= 0, started from the stationary
/// distribution. Carries the factor families of the absorbing generator's
/// block UL factorization T = (I - R_U) U_D (I - G_L), realized at the
/// solver's truncation level.
struct SojournBound {
  double alpha0 = 0.0;             // mass already at or below the boundary
  std::vector<Vector> alpha_vec;   // initial vectors per level, 1..K
  std::vector<Matrix> u_family;    // censored local generators U_1..U_K
  std::vector<Matrix> r_family;    // upward factors R_1..R_{K-1}
  std::vector<Matrix> g_family;    // downward factors G_2..G_K
  double mean_xi = 0.0;            // mean absorption time
  int levels = 0;                  // truncation level (the solution's k_star)
  double neglected_mass = 0.0;     // initial mass beyond the truncation
  Matrix t_trunc;                  // dense truncated absorbing generator
};

/// Assembles the truncated absorbing generator (levels 1..K block rows) as one
/// dense matrix.
inline Matrix assemble_absorbing_generator(const QueueModel& model, int levels) {
  const std::size_t n = model.block_order();
  Matrix t(static_cast<std::size_t>(levels) * n, static_cast<std::size_t>(levels) * n);
  auto put = [&](int bi, int bj, const Matrix& blk) {
    const std::size_t ri = static_cast<std::size_t>(bi - 1) * n;
    const std::size_t cj = static_cast<std::size_t>(bj - 1) * n;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) t(ri + i, cj + j) = blk(i, j);
  };
  for (int k = 1; k <= levels; ++k) {
    put(k, k, model.blocks_at(k).local);
    if (k < levels) put(k, k + 1, model.blocks_at(k).up);
    if (k > 1) put(k, k - 1, model.blocks_at(k).down);
  }
  return t;
}

/// Builds the sojourn bound from a solved model. The top-level censored
/// generator U_K closes the infinite tail through the terminal rate matrix;
/// the remaining censored generators, upward factors and downward factors
/// follow by one backward pass. The mean is evaluated through three
/// structured sweeps (never by forming a dense inverse):
///   w = (I - R_U)^{-1} e          backward substitution,
///   y_l = U_l^{-1} w_l            block-diagonal solves,
///   beta = alpha (I - G_L)^{-1}   backward substitution from the left,
///   mean = -sum_l beta_l . y_l.
inline SojournBound build_bound(const QueueModel& model,
                                const TruncatedStationarySolution& sol) {
  const int levels = sol.k_star;
  const std::size_t n = model.block_order();
  SojournBound bound;
  bound.levels = levels;

  double below = 0.0;
  for (std::int64_t k = -sol.k_star - 1; k <= 0; ++k) {
    const Vector& v = sol.pi_at(k);
    for (std::size_t i = 0; i < v.size(); ++i) below += std::max(v[i], 0.0);
  }
  bound.alpha0 = below;
  bound.neglected_mass = sol.pi_at(levels + 1).sum();
  bound.alpha_vec.reserve(static_cast<std::size_t>(levels));
  for (int k = 1; k <= levels; ++k) bound.alpha_vec.push_back(sol.pi_at(k));

  // censored local generators, top down
  std::vector<Matrix> u(static_cast<std::size_t>(levels));
  u[static_cast<std::size_t>(levels) - 1] =
      model.blocks_at(levels).local +
      sol.r_plus.back() * model.blocks_at(levels + 1).down;
  for (int l = levels - 1; l >= 1; --l) {
    const Matrix inv_next = inverse(-u[static_cast<std::size_t>(l)]);
    u[static_cast<std::size_t>(l) - 1] =
        model.blocks_at(l).local +
        model.blocks_at(l).up * inv_next * model.blocks_at(l + 1).down;
  }
  std::vector<Matrix> r(static_cast<std::size_t>(levels > 0 ? levels - 1 : 0));
  for (int l = 1; l <= levels - 1; ++l)
    r[static_cast<std::size_t>(l) - 1] =
        model.blocks_at(l).up * inverse(-u[static_cast<std::size_t>(l)]);
  std::vector<Matrix> g(static_cast<std::size_t>(levels > 0 ? levels - 1 : 0));
  for (int l = 2; l <= levels; ++l)
    g[static_cast<std::size_t>(l) - 2] =
        inverse(-u[static_cast<std::size_t>(l) - 1]) * model.blocks_at(l).down;

  // mean via the three sweeps
  std::vector<Vector> w(static_cast<std::size_t>(levels));
  w[static_cast<std::size_t>(levels) - 1] = Vector::ones(n);
  for (int l = levels - 1; l >= 1; --l)
    w[static_cast<std::size_t>(l) - 1] =
        Vector::ones(n) + r[static_cast<std::size_t>(l) - 1] * w[static_cast<std::size_t>(l)];
  std::vector<Vector> y(static_cast<std::size_t>(levels));
  for (int l = 1; l <= levels; ++l)
    y[static_cast<std::size_t>(l) - 1] =
        solve_linear(u[static_cast<std::size_t>(l) - 1], w[static_cast<std::size_t>(l) - 1]);
  Vector beta = bound.alpha_vec.back();
  double mean = -dot(beta, y.back());
  for (int l = levels - 1; l >= 1; --l) {
    beta = bound.alpha_vec[static_cast<std::size_t>(l) - 1] +
           beta * g[static_cast<std::size_t>(l) - 1];
    mean -= dot(beta, y[static_cast<std::size_t>(l) - 1]);
  }
  bound.mean_xi = mean;

  bound.u_family = std::move(u);
  bound.r_family = std::move(r);
  bound.g_family = std::move(g);
  bound.t_trunc = assemble_absorbing_generator(model, levels);
  return bound;
}

/// Distribution function of the absorption time: the probability that the
/// level process, started from the stationary law, has reached <= 0 by time
/// t. Evaluated as alpha*e - alpha*exp(T t)*e so that cdf(0) is exactly zero;
/// the limit for large t is the total initial mass above the boundary.
inline double cdf(const SojournBound& bound, double t) {
  if (t < 0.0) throw ConfigError("cdf: negative time");
  Vector alpha(static_cast<std::size_t>(bound.levels) *
               (bound.alpha_vec.empty() ? 0 : bound.alpha_vec.front().size()));
  std::size_t pos = 0;
  for (const Vector& v : bound.alpha_vec)
    for (std::size_t i = 0; i < v.size(); ++i) alpha[pos++] = v[i];
  const Vector at_t = exp_action(bound.t_trunc, alpha, t);
  return alpha.sum() - at_t.sum();
}

/// Probability of immediate absorption (the arriving mass already at or below
/// the boundary); identical to the report's p_no_a.
inline double prob_immediate(const SojournBound& bound) { return bound.alpha0; }

}  // namespace matchq
