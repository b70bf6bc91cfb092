#pragma once

#include <cstdint>
#include <utility>

#include "matchq/errors.hpp"
#include "matchq/linalg.hpp"
#include "matchq/map_process.hpp"

namespace matchq {

/// The three generator blocks of one level row: transitions one level down,
/// within the level, and one level up. down + local + up has zero row sums.
struct LevelBlocks {
  Matrix down;
  Matrix local;
  Matrix up;
  std::int64_t level = 0;
};

/// The double-ended queue: side-A arrivals (matched against side-B arrivals,
/// head-of-line first) plus exponential impatience at per-customer rates
/// theta1 (side A) and theta2 (side B). The level is the signed count
/// difference N_A - N_B; at most one side is ever nonempty, so the level walks
/// on all integers with phase space (B-phase) x (A-phase).
class QueueModel {
 public:
  QueueModel(MarkovianArrivalProcess map_a, MarkovianArrivalProcess map_b,
             double theta1, double theta2)
      : a_(std::move(map_a)),
        b_(std::move(map_b)),
        theta1_(theta1),
        theta2_(theta2),
        summary_a_(summarize(a_)),
        summary_b_(summarize(b_)),
        arrivals_a_(kron_product(Matrix::identity(b_.order), a_.d)),
        arrivals_b_(kron_product(b_.d, Matrix::identity(a_.order))),
        phase_local_(kron_sum(b_.c, a_.c)),
        a_only_local_(kron_product(Matrix::identity(b_.order), a_.c)),
        b_only_local_(kron_product(b_.c, Matrix::identity(a_.order))) {
    if (theta1 < 0.0 || theta2 < 0.0)
      throw ConfigError("impatience rates must be nonnegative");
  }

  const MarkovianArrivalProcess& map_a() const { return a_; }
  const MarkovianArrivalProcess& map_b() const { return b_; }
  double theta1() const { return theta1_; }
  double theta2() const { return theta2_; }
  std::size_t block_order() const { return a_.order * b_.order; }
  const MapSummary& summary_a() const { return summary_a_; }
  const MapSummary& summary_b() const { return summary_b_; }

  /// Level blocks of the bilateral generator at level k. Generated on demand;
  /// valid for any integer k.
  LevelBlocks blocks_at(std::int64_t k) const {
    LevelBlocks blk;
    blk.level = k;
    blk.up = arrivals_a_;
    blk.down = arrivals_b_;
    blk.local = phase_local_;
    if (k >= 1) {
      const double shift = static_cast<double>(k) * theta1_;
      blk.down.shift_diagonal(shift);
      blk.local.shift_diagonal(-shift);
    } else if (k <= -1) {
      const double shift = static_cast<double>(-k) * theta2_;
      blk.up.shift_diagonal(shift);
      blk.local.shift_diagonal(-shift);
    }
    return blk;
  }

  /// Local block of the upward half process at level k; at level 0 only the
  /// A-side phase transitions remain.
  Matrix upward_local(std::int64_t k) const {
    return k == 0 ? a_only_local_ : blocks_at(k).local;
  }

  /// Local block of the downward half process at level k; at level 0 only the
  /// B-side phase transitions remain.
  Matrix downward_local(std::int64_t k) const {
    return k == 0 ? b_only_local_ : blocks_at(k).local;
  }

  /// Stationary (up, down) transition rates seen from level k != 0, from the
  /// phase-averaged block identities: above the boundary the downward pull
  /// grows by k*theta1, below it the upward pull grows by |k|*theta2.
  std::pair<double, double> drift_rates(std::int64_t k) const {
    if (k == 0) throw ConfigError("drift_rates: level 0 has no single drift pair");
    const double l1 = summary_a_.rate;
    const double l2 = summary_b_.rate;
    if (k >= 1) return {l1, l2 + static_cast<double>(k) * theta1_};
    return {l1 + static_cast<double>(-k) * theta2_, l2};
  }

  /// The model with the two sides exchanged (maps and impatience rates
  /// swapped). Level k of the mirror corresponds to level -k here.
  QueueModel mirrored() const { return QueueModel(b_, a_, theta2_, theta1_); }

 private:
  MarkovianArrivalProcess a_;
  MarkovianArrivalProcess b_;
  double theta1_;
  double theta2_;
  MapSummary summary_a_;
  MapSummary summary_b_;
  Matrix arrivals_a_;   // I (x) D1
  Matrix arrivals_b_;   // D2 (x) I
  Matrix phase_local_;  // C2 (+) C1
  Matrix a_only_local_; // I (x) C1
  Matrix b_only_local_; // C2 (x) I
};

}  // namespace matchq
