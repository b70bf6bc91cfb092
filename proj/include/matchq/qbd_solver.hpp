#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "matchq/errors.hpp"
#include "matchq/linalg.hpp"
#include "matchq/queue_model.hpp"
#include "matchq/stability.hpp"

namespace matchq {

/// Solver knobs. The defaults reproduce the reference configuration: tail-mass
/// threshold 1e-20 and candidate truncation levels 10, 20, 30, ...
struct SolverConfig {
  double epsilon = 1e-20;
  std::vector<int> level_schedule;  // empty: 10*(n+1) for n < max_schedule_steps
  double series_tol = 1e-14;
  int max_schedule_steps = 50;

  std::vector<int> schedule() const {
    std::vector<int> s = level_schedule;
    if (s.empty()) {
      s.reserve(static_cast<std::size_t>(std::max(max_schedule_steps, 0)));
      for (int n = 0; n < max_schedule_steps; ++n) s.push_back(10 * (n + 1));
    }
    if (s.empty()) throw ConfigError("level schedule is empty");
    if (s.front() < 2) throw ConfigError("level schedule must start at 2 or above");
    for (std::size_t i = 1; i < s.size(); ++i)
      if (s[i] <= s[i - 1]) throw ConfigError("level schedule must be strictly increasing");
    if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
    return s;
  }
};

/// Stationary distribution of the level process, truncated at level k_star:
/// probability vectors pi_k for |k| <= k_star + 1, the rate-matrix families on
/// both sides, the boundary solution and its normalization constant.
struct TruncatedStationarySolution {
  int k_star = 0;
  std::vector<Matrix> r_plus;   // r_plus[i]  is the rate matrix at level i+1, i < k_star
  std::vector<Matrix> r_minus;  // r_minus[i] is the rate matrix at level -(i+1)
  std::vector<Vector> pi;       // levels -k_star-1 .. k_star+1
  Vector boundary_m1, boundary_0, boundary_p1;  // pre-normalization boundary vectors
  double c = 0.0;               // normalization constant
  double tail_mass = 0.0;       // ||pi_{-k_star-1}||_1 + ||pi_{k_star+1}||_1

  const Vector& pi_at(std::int64_t k) const {
    const std::int64_t idx = k + k_star + 1;
    if (idx < 0 || idx >= static_cast<std::int64_t>(pi.size()))
      throw DimensionError("pi_at: level " + std::to_string(k) + " outside truncation");
    return pi[static_cast<std::size_t>(idx)];
  }
  double total_mass() const {
    double s = 0.0;
    for (const Vector& v : pi) s += v.sum();
    return s;
  }
};

namespace detail {

/// Doubling-series evaluation of the rate matrix at a deep level of the
/// level-dependent half process. direction +1 walks the upper half (levels
/// k >= 1), -1 the lower half (levels k <= -1); the recursions are mirror
/// images indexed away from the boundary.
class DoublingSeries {
 public:
  DoublingSeries(const QueueModel& model, int direction)
      : model_(model), dir_(direction) {}

  Matrix rate_matrix(std::int64_t k, double tol) {
    constexpr int kMaxTerms = 64;
    Matrix r(model_.block_order(), model_.block_order());
    for (int l = 0; l <= kMaxTerms; ++l) {
      if (l >= 61)
        throw NonConvergentError("doubling series: level index range exhausted");
      Matrix term = u(k, l);
      for (int i = 0; i < l; ++i)
        term = term * d(k + dir_ * (std::int64_t{1} << (l - i)), l - 1 - i);
      r += term;
      if (term.max_abs() < tol) return r;
    }
    throw NonConvergentError("doubling series: no convergence within 64 terms");
  }

 private:
  Matrix away(std::int64_t j) const {
    const LevelBlocks blk = model_.blocks_at(j);
    return dir_ > 0 ? blk.up : blk.down;
  }
  Matrix toward(std::int64_t j) const {
    const LevelBlocks blk = model_.blocks_at(j);
    return dir_ > 0 ? blk.down : blk.up;
  }
  Matrix local(std::int64_t j) const {
    return dir_ > 0 ? model_.upward_local(j) : model_.downward_local(j);
  }

  const Matrix& u(std::int64_t j, int l) {
    const auto key = std::make_pair(j, l);
    auto it = u_memo_.find(key);
    if (it != u_memo_.end()) return it->second;
    Matrix v;
    if (l == 0) {
      v = away(j) * inverse(-local(j + dir_));
    } else {
      const std::int64_t s = std::int64_t{1} << (l - 1);
      Matrix gap = Matrix::identity(model_.block_order());
      gap -= u(j + dir_ * 2 * s, l - 1) * d(j + dir_ * 3 * s, l - 1);
      gap -= d(j + dir_ * 2 * s, l - 1) * u(j + dir_ * s, l - 1);
      v = u(j, l - 1) * u(j + dir_ * s, l - 1) * inverse(gap);
    }
    return u_memo_.emplace(key, std::move(v)).first->second;
  }

  const Matrix& d(std::int64_t j, int l) {
    const auto key = std::make_pair(j, l);
    auto it = d_memo_.find(key);
    if (it != d_memo_.end()) return it->second;
    Matrix v;
    if (l == 0) {
      v = toward(j) * inverse(-local(j - dir_));
    } else {
      const std::int64_t s = std::int64_t{1} << (l - 1);
      Matrix gap = Matrix::identity(model_.block_order());
      gap -= u(j - dir_ * 2 * s, l - 1) * d(j - dir_ * s, l - 1);
      gap -= d(j - dir_ * 2 * s, l - 1) * u(j - dir_ * 3 * s, l - 1);
      v = d(j, l - 1) * d(j - dir_ * s, l - 1) * inverse(gap);
    }
    return d_memo_.emplace(key, std::move(v)).first->second;
  }

  const QueueModel& model_;
  std::int64_t dir_;
  std::map<std::pair<std::int64_t, int>, Matrix> u_memo_;
  std::map<std::pair<std::int64_t, int>, Matrix> d_memo_;
};

}  // namespace detail

/// Rate matrix at level k >= 1 of the upper half process, from the doubling
/// series. The result is the minimal nonnegative solution block: it satisfies
/// up(k) + R_k*local(k+1) + R_k*R_{k+1}*down(k+2) = 0 together with its
/// successors.
inline Matrix bright_taylor_r(const QueueModel& model, std::int64_t k, double tol) {
  if (k < 1) throw ConfigError("bright_taylor_r: level must be >= 1");
  return detail::DoublingSeries(model, +1).rate_matrix(k, tol);
}

/// Mirror of bright_taylor_r for the lower half process, k <= -1.
inline Matrix bright_taylor_r_neg(const QueueModel& model, std::int64_t k, double tol) {
  if (k > -1) throw ConfigError("bright_taylor_r_neg: level must be <= -1");
  return detail::DoublingSeries(model, -1).rate_matrix(k, tol);
}

/// Backward recursion from a terminal rate matrix at level K down to level 1:
/// R_k = up(k) * (-local(k+1) - R_{k+1} down(k+2))^{-1}.
/// Returns {R_1, ..., R_K} with R_K = r_terminal.
inline std::vector<Matrix> backward_sweep(const QueueModel& model,
                                          const Matrix& r_terminal, int levels) {
  if (levels < 1) throw ConfigError("backward_sweep: need at least one level");
  std::vector<Matrix> r(static_cast<std::size_t>(levels));
  r[static_cast<std::size_t>(levels) - 1] = r_terminal;
  for (int k = levels - 1; k >= 1; --k) {
    Matrix denom = -model.blocks_at(k + 1).local;
    denom -= r[static_cast<std::size_t>(k)] * model.blocks_at(k + 2).down;
    r[static_cast<std::size_t>(k) - 1] = model.blocks_at(k).up * inverse(denom);
  }
  return r;
}

/// Mirror sweep on the negative side. Returns {R_{-1}, ..., R_{-K}} with the
/// terminal matrix at level -K.
inline std::vector<Matrix> backward_sweep_neg(const QueueModel& model,
                                              const Matrix& r_terminal, int levels) {
  if (levels < 1) throw ConfigError("backward_sweep_neg: need at least one level");
  std::vector<Matrix> r(static_cast<std::size_t>(levels));
  r[static_cast<std::size_t>(levels) - 1] = r_terminal;
  for (int k = levels - 1; k >= 1; --k) {
    Matrix denom = -model.blocks_at(-k - 1).local;
    denom -= r[static_cast<std::size_t>(k)] * model.blocks_at(-k - 2).up;
    r[static_cast<std::size_t>(k) - 1] = model.blocks_at(-k).down * inverse(denom);
  }
  return r;
}

struct BoundaryVectors {
  Vector pm1;  // level -1
  Vector p0;   // level 0
  Vector p1;   // level +1
};

/// Solves the three-level boundary system that couples the two half
/// processes. The homogeneous balance equations for levels -1, 0, +1 have a
/// one-dimensional null space for a positive recurrent model; the last scalar
/// equation of the level +1 block is replaced by the joint normalization
/// pm1*e + p0*e + p1*e = 1.
inline BoundaryVectors solve_boundary(const QueueModel& model, const Matrix& r1,
                                      const Matrix& r_neg1) {
  const std::size_t n = model.block_order();
  Matrix m(3 * n, 3 * n);
  auto put = [&](std::size_t bi, std::size_t bj, const Matrix& blk) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) m(bi * n + i, bj * n + j) = blk(i, j);
  };
  // columns: balance equations at levels -1, 0, +1; rows: unknown blocks
  put(0, 0, r_neg1 * model.blocks_at(-2).up + model.blocks_at(-1).local);
  put(0, 1, model.blocks_at(-1).up);
  put(1, 0, model.blocks_at(0).down);
  put(1, 1, model.blocks_at(0).local);
  put(1, 2, model.blocks_at(0).up);
  put(2, 1, model.blocks_at(1).down);
  put(2, 2, model.blocks_at(1).local + r1 * model.blocks_at(2).down);

  Matrix a = m.transposed();
  for (std::size_t j = 0; j < 3 * n; ++j) a(3 * n - 1, j) = 1.0;
  Vector rhs(3 * n);
  rhs[3 * n - 1] = 1.0;
  const Vector x = solve_linear(a, rhs);

  BoundaryVectors out{Vector(n), Vector(n), Vector(n)};
  for (std::size_t i = 0; i < n; ++i) {
    out.pm1[i] = x[i];
    out.p0[i] = x[n + i];
    out.p1[i] = x[2 * n + i];
  }
  return out;
}

/// Normalization constant over the truncated level range:
/// 1 / (sum of all level masses built from the boundary vectors and the two
/// rate-matrix families, levels -(K+1) .. K+1).
inline double normalization_constant(const BoundaryVectors& boundary,
                                     const std::vector<Matrix>& r_plus,
                                     const std::vector<Matrix>& r_minus) {
  double denom = boundary.pm1.sum() + boundary.p0.sum() + boundary.p1.sum();
  Vector v = boundary.pm1;
  for (const Matrix& r : r_minus) {  // levels -2 .. -(K+1)
    v = v * r;
    denom += v.sum();
  }
  Vector w = boundary.p1;
  for (const Matrix& r : r_plus) {  // levels 2 .. K+1
    w = w * r;
    denom += w.sum();
  }
  return 1.0 / denom;
}

/// Full stationary solve. Walks the truncation-level schedule; at each
/// candidate level K it evaluates the doubling series at +-K, sweeps the rate
/// matrices back to the boundary, solves the boundary system, normalizes, and
/// assembles pi over |k| <= K+1. Stops at the first K whose outermost level
/// masses fall below epsilon.
inline TruncatedStationarySolution solve(const QueueModel& model,
                                         const SolverConfig& config = {}) {
  const RecurrenceClass cls = classify(model);
  if (cls.tag != Recurrence::PositiveRecurrent)
    throw NotStableError(std::string("solve: model is not positive recurrent (") +
                         to_string(cls.tag) + ", " + cls.rationale + ")");
  const std::vector<int> schedule = config.schedule();

  std::vector<std::pair<int, double>> tails_seen;
  for (const int levels : schedule) {
    const Matrix r_top = bright_taylor_r(model, levels, config.series_tol);
    const Matrix r_bottom = bright_taylor_r_neg(model, -levels, config.series_tol);
    std::vector<Matrix> r_plus = backward_sweep(model, r_top, levels);
    std::vector<Matrix> r_minus = backward_sweep_neg(model, r_bottom, levels);
    const BoundaryVectors boundary = solve_boundary(model, r_plus.front(), r_minus.front());
    const double c = normalization_constant(boundary, r_plus, r_minus);

    TruncatedStationarySolution sol;
    sol.k_star = levels;
    sol.r_plus = std::move(r_plus);
    sol.r_minus = std::move(r_minus);
    sol.boundary_m1 = boundary.pm1;
    sol.boundary_0 = boundary.p0;
    sol.boundary_p1 = boundary.p1;
    sol.c = c;
    sol.pi.assign(2 * static_cast<std::size_t>(levels) + 3, Vector());
    auto set_pi = [&](std::int64_t k, Vector v) {
      sol.pi[static_cast<std::size_t>(k + levels + 1)] = std::move(v);
    };
    set_pi(-1, boundary.pm1 * c);
    set_pi(0, boundary.p0 * c);
    set_pi(1, boundary.p1 * c);
    Vector v = boundary.pm1 * c;
    for (int i = 0; i < levels; ++i) {
      v = v * sol.r_minus[static_cast<std::size_t>(i)];
      set_pi(-2 - i, v);
    }
    Vector w = boundary.p1 * c;
    for (int i = 0; i < levels; ++i) {
      w = w * sol.r_plus[static_cast<std::size_t>(i)];
      set_pi(2 + i, w);
    }
    sol.tail_mass = sol.pi.front().one_norm() + sol.pi.back().one_norm();
    if (sol.tail_mass < config.epsilon) return sol;
    tails_seen.emplace_back(levels, sol.tail_mass);
  }

  std::string msg = "solve: no scheduled truncation level met the stop condition;";
  for (const auto& [k, tail] : tails_seen)
    msg += " K=" + std::to_string(k) + " tail=" + std::to_string(tail);
  throw ScheduleExhaustedError(msg, std::move(tails_seen));
}

}  // namespace matchq
