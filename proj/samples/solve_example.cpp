// Minimal library walkthrough: build a model, check stability, solve it,
// and print the headline measures next to a quick simulation.

#include <cstdio>

#include "matchq/matchq.hpp"

int main() {
  using namespace matchq;

  // side A: bursty order-2 arrivals; side B: Erlang-2 renewal arrivals
  QueueModel model(validate(Matrix::from_rows({{-10, 0}, {1, -1}}),
                            Matrix::from_rows({{9, 1}, {0, 0}})),
                   erlang(2, 9.0), /*theta1=*/0.5, /*theta2=*/1.0);

  const RecurrenceClass cls = classify(model);
  std::printf("stability: %s (%s)\n", to_string(cls.tag), cls.rationale.c_str());
  if (cls.tag != Recurrence::PositiveRecurrent) return 1;

  const TruncatedStationarySolution solution = solve(model);
  const PerformanceReport perf = report(solution);
  const SojournBound bound = build_bound(model, solution);
  std::printf("truncation level %d, tail mass %.2e\n", solution.k_star,
              solution.tail_mass);
  std::printf("P{no A} %.4f  P{no B} %.4f  E[Q_A] %.4f  E[Q_B] %.4f\n", perf.p_no_a,
              perf.p_no_b, perf.mean_q_a, perf.mean_q_b);
  std::printf("sojourn bound: E[xi_A] %.4f, P{xi_A = 0} %.4f, F(1) %.4f\n",
              bound.mean_xi, prob_immediate(bound), cdf(bound, 1.0));

  SimConfig sim_cfg;
  sim_cfg.horizon = 2e5;
  sim_cfg.warmup = 2e3;
  sim_cfg.seed = 42;
  const SimReport sim = simulate(model, sim_cfg);
  std::printf("simulated E[level diff] %.4f +- %.4f (solver %.4f)\n",
              sim.mean_level_diff.value, sim.mean_level_diff.half_width,
              perf.mean_level_diff);
  return 0;
}
