#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "matchq/performance.hpp"
#include "matchq/qbd_solver.hpp"
#include "matchq/sojourn.hpp"
#include "test_support.hpp"

using namespace matchq;

namespace {

// Direct oracle for the mean absorption time: solve (-T) h = e on a deep
// truncation of the absorbing generator, then weight by the initial vectors.
double mean_absorption_direct(const QueueModel& m,
                              const TruncatedStationarySolution& sol, int depth) {
  Matrix t = assemble_absorbing_generator(m, depth);
  Vector h = solve_linear(-t, Vector::ones(t.rows()));
  const std::size_t n = m.block_order();
  double mean = 0.0;
  for (int k = 1; k <= sol.k_star; ++k) {
    const Vector& pik = sol.pi_at(k);
    for (std::size_t i = 0; i < n; ++i)
      mean += pik[i] * h[static_cast<std::size_t>(k - 1) * n + i];
  }
  return mean;
}

}  // namespace

TEST_CASE("mean bound matches the direct absorption solve") {
  SECTION("scalar model") {
    QueueModel m = test::poisson_model(5.0, test::kRate2, 0.25, 1.0);
    TruncatedStationarySolution sol = solve(m);
    SojournBound bound = build_bound(m, sol);
    const double direct = mean_absorption_direct(m, sol, 3 * sol.k_star);
    REQUIRE(std::abs(bound.mean_xi - direct) < 1e-8);
    // verified value for this model
    REQUIRE(std::abs(bound.mean_xi - 3.1218950843) < 1e-6);
  }
  SECTION("block model") {
    QueueModel m = test::map2_model(0.25, 1.0);
    TruncatedStationarySolution sol = solve(m);
    SojournBound bound = build_bound(m, sol);
    const double direct = mean_absorption_direct(m, sol, 2 * sol.k_star);
    REQUIRE(std::abs(bound.mean_xi - direct) < 1e-8);
    REQUIRE(std::abs(bound.mean_xi - 3.3816904625) < 1e-6);
  }
}

TEST_CASE("upward factors reuse the stationary family") {
  QueueModel m = test::map2_model(0.75, 1.0);
  TruncatedStationarySolution sol = solve(m);
  SojournBound bound = build_bound(m, sol);
  REQUIRE(bound.r_family.size() == static_cast<std::size_t>(sol.k_star) - 1);
  for (std::size_t i = 0; i < bound.r_family.size(); ++i)
    REQUIRE(test::max_abs_diff(bound.r_family[i], sol.r_plus[i]) < 1e-10);
}

TEST_CASE("factor families have the right signs") {
  QueueModel m = test::map2_model(0.25, 1.0);
  TruncatedStationarySolution sol = solve(m);
  SojournBound bound = build_bound(m, sol);
  REQUIRE(bound.mean_xi >= 0.0);
  for (const Matrix& u : bound.u_family)
    for (std::size_t i = 0; i < u.rows(); ++i) REQUIRE(u(i, i) < 0.0);
  for (const Matrix& g : bound.g_family)
    for (std::size_t i = 0; i < g.rows(); ++i)
      for (std::size_t j = 0; j < g.cols(); ++j) REQUIRE(g(i, j) >= -1e-15);
  // initial mass splits between the immediate part and the level vectors
  double above = 0.0;
  for (const Vector& v : bound.alpha_vec) above += v.sum();
  REQUIRE(std::abs(bound.alpha0 + above - 1.0) < 1e-10);
}

TEST_CASE("factorization reassembles the absorbing generator") {
  QueueModel m = test::map2_model(0.25, 1.0);
  TruncatedStationarySolution sol = solve(m);
  SojournBound bound = build_bound(m, sol);
  const int K = bound.levels;
  const std::size_t n = m.block_order();
  const std::size_t total = static_cast<std::size_t>(K) * n;

  Matrix iru = Matrix::identity(total);
  Matrix ud(total, total);
  Matrix igl = Matrix::identity(total);
  auto put = [&](Matrix& dst, int bi, int bj, const Matrix& blk, double scale) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        dst(static_cast<std::size_t>(bi - 1) * n + i,
            static_cast<std::size_t>(bj - 1) * n + j) = scale * blk(i, j);
  };
  for (int l = 1; l <= K - 1; ++l) put(iru, l, l + 1, bound.r_family[l - 1], -1.0);
  for (int l = 1; l <= K; ++l) put(ud, l, l, bound.u_family[l - 1], 1.0);
  for (int l = 2; l <= K; ++l) put(igl, l, l - 1, bound.g_family[l - 2], -1.0);

  Matrix reassembled = iru * ud * igl;
  Matrix expected = bound.t_trunc;
  // the terminal diagonal block censors the cut-off tail
  Matrix closure = sol.r_plus.back() * m.blocks_at(K + 1).down;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      expected(total - n + i, total - n + j) += closure(i, j);
  REQUIRE(test::max_abs_diff(reassembled, expected) < 1e-8);
}

TEST_CASE("conservation of the absorbing generator rows") {
  QueueModel m = test::map2_model(0.75, 1.0);
  const int K = 12;
  Matrix t = assemble_absorbing_generator(m, K);
  const std::size_t n = m.block_order();
  // row sums plus the absorption column vanish on structurally complete rows
  Vector absorb = m.blocks_at(1).down * Vector::ones(n);
  Vector row_sums = t * Vector::ones(t.rows());
  for (std::size_t i = 0; i < static_cast<std::size_t>(K - 1) * n; ++i) {
    const double t0 = i < n ? absorb[i] : 0.0;
    REQUIRE(std::abs(row_sums[i] + t0) < 1e-12);
  }
}

TEST_CASE("distribution function of the bound") {
  QueueModel m = test::poisson_model(5.0, test::kRate2, 0.75, 1.0);
  TruncatedStationarySolution sol = solve(m);
  SojournBound bound = build_bound(m, sol);

  SECTION("zero at zero, exactly") {
    REQUIRE(cdf(bound, 0.0) == 0.0);
  }
  SECTION("saturates at the mass above the boundary") {
    const double limit = 1.0 - bound.alpha0;
    REQUIRE(std::abs(cdf(bound, 1000.0 * bound.mean_xi) - limit) < 1e-6);
  }
  SECTION("nondecreasing and capped") {
    double prev = 0.0;
    for (int i = 1; i <= 20; ++i) {
      const double value = cdf(bound, 0.3 * i * bound.mean_xi);
      REQUIRE(value >= prev);
      REQUIRE(value <= 1.0 - bound.alpha0 + 1e-12);
      prev = value;
    }
  }
  SECTION("matches a fine-step independent evaluation at t = 1") {
    // independent transient solve: expose the survival probability through
    // many small exact exponential steps of the scalar absorbing chain
    const int depth = 3 * sol.k_star;
    Matrix t = assemble_absorbing_generator(m, depth);
    Vector alpha(static_cast<std::size_t>(depth));
    for (int k = 1; k <= sol.k_star; ++k) alpha[k - 1] = sol.pi_at(k)[0];
    const int steps = 4096;
    Vector w = alpha;
    for (int s = 0; s < steps; ++s) w = exp_action(t, w, 1.0 / steps);
    const double expected = alpha.sum() - w.sum();
    REQUIRE(std::abs(cdf(bound, 1.0) - expected) < 1e-8);
  }
  SECTION("negative times rejected") {
    REQUIRE_THROWS_AS(cdf(bound, -0.5), ConfigError);
  }
}

TEST_CASE("immediate-absorption probability") {
  QueueModel m = test::poisson_model(5.0, test::kRate2, 0.25, 1.0);
  TruncatedStationarySolution sol = solve(m);
  SojournBound bound = build_bound(m, sol);
  PerformanceReport rep = report(sol);
  REQUIRE(std::abs(prob_immediate(bound) - rep.p_no_a) < 1e-12);
  REQUIRE(std::abs(prob_immediate(bound) - 0.2850) < 5e-5);

  QueueModel sym = test::poisson_model(2.0, 2.0, 0.5, 0.5);
  TruncatedStationarySolution ssol = solve(sym);
  SojournBound sbound = build_bound(sym, ssol);
  PerformanceReport srep = report(ssol);
  REQUIRE(std::abs(prob_immediate(sbound) - srep.p_no_b) < 1e-12);
}

TEST_CASE("mirrored model bounds the other side") {
  QueueModel m = test::poisson_model(1.0, 2.0, 1.0, 2.0);
  QueueModel mirror = m.mirrored();
  TruncatedStationarySolution sol = solve(m);
  TruncatedStationarySolution msol = solve(mirror);
  PerformanceReport rep = report(sol);
  PerformanceReport mrep = report(msol);
  REQUIRE(std::abs(rep.p_no_a - mrep.p_no_b) < 1e-12);
  REQUIRE(std::abs(rep.mean_q_a - mrep.mean_q_b) < 1e-10);
  SojournBound b_side = build_bound(mirror, msol);
  REQUIRE(b_side.mean_xi >= 0.0);
  REQUIRE(std::abs(prob_immediate(b_side) - rep.p_no_b) < 1e-10);
}
