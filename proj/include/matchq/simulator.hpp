#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <vector>

#include "matchq/errors.hpp"
#include "matchq/queue_model.hpp"

namespace matchq {

struct SimConfig {
  double horizon = 1e6;
  double warmup = 1e4;
  std::uint64_t seed = 1;
  int batches = 20;
};

struct Estimate {
  double value = 0.0;
  double half_width = 0.0;  // 95% batch-means half-width
};

struct SimReport {
  Estimate p_no_a, p_no_b, p_empty;
  Estimate mean_q_a, mean_q_b, mean_q_composite, mean_q_total_abs, mean_level_diff;
  Estimate mean_wait_a;
  double abandon_frac_a = 0.0;
  double abandon_frac_b = 0.0;
  std::uint64_t events = 0;
};

namespace detail {

/// Counter-based generator: one independent stream per random-input role, so
/// replays are reproducible stream by stream.
class SplitMixStream {
 public:
  SplitMixStream(std::uint64_t seed, std::uint64_t stream)
      : state_(seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1))) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  double next_unit() {  // [0, 1)
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }
  double next_exponential(double rate) {
    if (rate <= 0.0) return std::numeric_limits<double>::infinity();
    return -std::log(1.0 - next_unit()) / rate;
  }
  std::size_t next_index(std::size_t n) {
    return static_cast<std::size_t>(next_unit() * static_cast<double>(n)) % n;
  }

 private:
  std::uint64_t state_;
};

/// Two-tailed 97.5% Student-t quantiles for small degrees of freedom; large
/// df falls back to the normal quantile.
inline double t_quantile_975(int df) {
  static const double table[] = {12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365,
                                 2.306,  2.262, 2.228, 2.201, 2.179, 2.160, 2.145,
                                 2.131,  2.120, 2.110, 2.101, 2.093, 2.086, 2.080,
                                 2.074,  2.069, 2.064, 2.060, 2.056, 2.052, 2.048,
                                 2.045,  2.042};
  if (df < 1) return 12.706;
  if (df <= 30) return table[df - 1];
  if (df <= 40) return 2.021;
  if (df <= 60) return 2.000;
  if (df <= 120) return 1.980;
  return 1.960;
}

inline Estimate batch_estimate(const std::vector<double>& batch_values) {
  const int b = static_cast<int>(batch_values.size());
  Estimate e;
  if (b == 0) return e;
  double mean = 0.0;
  for (double v : batch_values) mean += v;
  mean /= b;
  double var = 0.0;
  for (double v : batch_values) var += (v - mean) * (v - mean);
  var = b > 1 ? var / (b - 1) : 0.0;
  e.value = mean;
  e.half_width = t_quantile_975(b - 1) * std::sqrt(var / b);
  return e;
}

/// One MAP phase move: picks an arrival transition (weight d(row, j)) or a
/// hidden transition (weight c(row, j), j != row). Returns true on arrival.
inline bool map_transition(const MarkovianArrivalProcess& map, std::size_t& phase,
                           SplitMixStream& rng) {
  const std::size_t m = map.order;
  const double total = -map.c(phase, phase);
  double pick = rng.next_unit() * total;
  for (std::size_t j = 0; j < m; ++j) {
    pick -= map.d(phase, j);
    if (pick < 0.0) {
      phase = j;
      return true;
    }
  }
  for (std::size_t j = 0; j < m; ++j) {
    if (j == phase) continue;
    pick -= map.c(phase, j);
    if (pick < 0.0) {
      phase = j;
      return false;
    }
  }
  // roundoff fell off the end: treat as a hidden self-loop (no state change)
  return false;
}

}  // namespace detail

/// Discrete-event simulation of the matched queue: two MAP phase clocks, one
/// aggregate abandonment clock per side (rate n*theta, uniform victim), exact
/// head-of-line matching with zero matching time. Statistics are time
/// averages over equal post-warmup batches; waits are attributed to the batch
/// in which the customer leaves. Fully deterministic for a given seed.
inline SimReport simulate(const QueueModel& model, const SimConfig& config) {
  if (!(config.horizon > 0.0) || config.warmup < 0.0 || config.warmup >= config.horizon)
    throw ConfigError("simulate: need 0 <= warmup < horizon");
  if (config.batches < 2) throw ConfigError("simulate: need at least two batches");

  detail::SplitMixStream rng_a(config.seed, 0);      // side-A phase process
  detail::SplitMixStream rng_b(config.seed, 1);      // side-B phase process
  detail::SplitMixStream rng_abandon(config.seed, 2);
  detail::SplitMixStream rng_victim(config.seed, 3);

  const MarkovianArrivalProcess& map_a = model.map_a();
  const MarkovianArrivalProcess& map_b = model.map_b();
  const double theta1 = model.theta1();
  const double theta2 = model.theta2();

  std::size_t phase_a = 0, phase_b = 0;
  std::deque<double> waiting_a, waiting_b;  // arrival stamps; at most one nonempty
  double now = 0.0;

  const int batches = config.batches;
  const double batch_len = (config.horizon - config.warmup) / batches;
  struct BatchAcc {
    double time_neg = 0, time_zero = 0, time_pos = 0;
    double level_area = 0, abs_area = 0, pos_area = 0, neg_area = 0;
    double wait_sum = 0;
    std::uint64_t wait_count = 0;
  };
  std::vector<BatchAcc> acc(static_cast<std::size_t>(batches));

  std::uint64_t arrivals_a = 0, arrivals_b = 0, abandons_a = 0, abandons_b = 0;
  std::uint64_t events = 0;

  auto batch_of = [&](double t) {
    const int b = static_cast<int>((t - config.warmup) / batch_len);
    return static_cast<std::size_t>(b < 0 ? 0 : (b >= batches ? batches - 1 : b));
  };

  auto accumulate_occupancy = [&](double from, double to) {
    double lo = std::max(from, config.warmup);
    if (lo >= to) return;
    const double level = static_cast<double>(waiting_a.size()) -
                         static_cast<double>(waiting_b.size());
    while (lo < to) {
      const std::size_t b = batch_of(lo);
      const double end = std::min(to, config.warmup + (static_cast<double>(b) + 1) * batch_len);
      const double dt = end - lo;
      BatchAcc& a = acc[b];
      if (level < 0) a.time_neg += dt;
      else if (level > 0) a.time_pos += dt;
      else a.time_zero += dt;
      a.level_area += level * dt;
      a.abs_area += std::abs(level) * dt;
      if (level > 0) a.pos_area += level * dt;
      if (level < 0) a.neg_area += -level * dt;
      lo = end;
    }
  };

  auto record_wait = [&](double arrived, double left) {
    if (left < config.warmup) return;
    BatchAcc& a = acc[batch_of(left)];
    a.wait_sum += left - arrived;
    a.wait_count += 1;
  };

  while (now < config.horizon) {
    const double rate_a = -map_a.c(phase_a, phase_a);
    const double rate_b = -map_b.c(phase_b, phase_b);
    const double rate_ab1 = static_cast<double>(waiting_a.size()) * theta1;
    const double rate_ab2 = static_cast<double>(waiting_b.size()) * theta2;

    const double t_a = rng_a.next_exponential(rate_a);
    const double t_b = rng_b.next_exponential(rate_b);
    const double t_ab1 = rng_abandon.next_exponential(rate_ab1);
    const double t_ab2 = rng_abandon.next_exponential(rate_ab2);

    double dt = t_a;
    int winner = 0;
    if (t_b < dt) { dt = t_b; winner = 1; }
    if (t_ab1 < dt) { dt = t_ab1; winner = 2; }
    if (t_ab2 < dt) { dt = t_ab2; winner = 3; }

    const double next = now + dt;
    if (next >= config.horizon) {
      accumulate_occupancy(now, config.horizon);
      now = config.horizon;
      break;
    }
    accumulate_occupancy(now, next);
    now = next;
    ++events;

    switch (winner) {
      case 0:
        if (detail::map_transition(map_a, phase_a, rng_a)) {
          ++arrivals_a;
          if (!waiting_b.empty()) {
            waiting_b.pop_front();
            record_wait(now, now);  // matched on arrival, zero wait
          } else {
            waiting_a.push_back(now);
          }
        }
        break;
      case 1:
        if (detail::map_transition(map_b, phase_b, rng_b)) {
          ++arrivals_b;
          if (!waiting_a.empty()) {
            record_wait(waiting_a.front(), now);
            waiting_a.pop_front();
          } else {
            waiting_b.push_back(now);
          }
        }
        break;
      case 2: {
        const std::size_t victim = rng_victim.next_index(waiting_a.size());
        record_wait(waiting_a[victim], now);
        waiting_a.erase(waiting_a.begin() + static_cast<std::ptrdiff_t>(victim));
        ++abandons_a;
        break;
      }
      case 3: {
        const std::size_t victim = rng_victim.next_index(waiting_b.size());
        waiting_b.erase(waiting_b.begin() + static_cast<std::ptrdiff_t>(victim));
        ++abandons_b;
        break;
      }
    }
  }

  std::vector<double> v_no_a, v_no_b, v_empty, v_qa, v_qb, v_comp, v_abs, v_diff, v_wait;
  for (const auto& a : acc) {
    const double span = a.time_neg + a.time_zero + a.time_pos;
    if (span <= 0.0) continue;
    const double pa = (a.time_neg + a.time_zero) / span;
    const double pb = (a.time_pos + a.time_zero) / span;
    const double qa = a.pos_area / span;
    const double qb = a.neg_area / span;
    v_no_a.push_back(pa);
    v_no_b.push_back(pb);
    v_empty.push_back(a.time_zero / span);
    v_qa.push_back(qa);
    v_qb.push_back(qb);
    v_comp.push_back(qa * (1.0 - pa) + qb * (1.0 - pb));
    v_abs.push_back(a.abs_area / span);
    v_diff.push_back(a.level_area / span);
    if (a.wait_count > 0) v_wait.push_back(a.wait_sum / static_cast<double>(a.wait_count));
  }

  SimReport rep;
  rep.p_no_a = detail::batch_estimate(v_no_a);
  rep.p_no_b = detail::batch_estimate(v_no_b);
  rep.p_empty = detail::batch_estimate(v_empty);
  rep.mean_q_a = detail::batch_estimate(v_qa);
  rep.mean_q_b = detail::batch_estimate(v_qb);
  rep.mean_q_composite = detail::batch_estimate(v_comp);
  rep.mean_q_total_abs = detail::batch_estimate(v_abs);
  rep.mean_level_diff = detail::batch_estimate(v_diff);
  rep.mean_wait_a = detail::batch_estimate(v_wait);
  rep.abandon_frac_a = arrivals_a ? static_cast<double>(abandons_a) / arrivals_a : 0.0;
  rep.abandon_frac_b = arrivals_b ? static_cast<double>(abandons_b) / arrivals_b : 0.0;
  rep.events = events;
  return rep;
}

}  // namespace matchq
