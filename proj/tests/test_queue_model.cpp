#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "matchq/queue_model.hpp"
#include "test_support.hpp"

using namespace matchq;

TEST_CASE("scalar blocks reduce to birth-death rates") {
  QueueModel m = test::poisson_model(5.0, 4.0, 0.5, 0.25);
  LevelBlocks blk = m.blocks_at(3);
  REQUIRE(blk.up(0, 0) == 5.0);
  REQUIRE(blk.down(0, 0) == 4.0 + 3 * 0.5);
  REQUIRE(blk.local(0, 0) == -(5.0 + 4.0 + 3 * 0.5));

  LevelBlocks neg = m.blocks_at(-2);
  REQUIRE(neg.up(0, 0) == 5.0 + 2 * 0.25);
  REQUIRE(neg.down(0, 0) == 4.0);
  REQUIRE(neg.local(0, 0) == -(5.0 + 4.0 + 2 * 0.25));
}

TEST_CASE("level rows conserve rate") {
  test::Rng rng(3);
  for (int trial = 0; trial < 6; ++trial) {
    QueueModel m(test::random_map(rng, 1 + rng.next_index(3)),
                 test::random_map(rng, 1 + rng.next_index(3)), rng.next_unit(),
                 rng.next_unit());
    for (std::int64_t k : {-7, -1, 0, 1, 2, 30}) {
      LevelBlocks blk = m.blocks_at(k);
      Vector rows = (blk.down + blk.local + blk.up) * Vector::ones(m.block_order());
      REQUIRE(rows.inf_norm() < 1e-12);
    }
  }
}

TEST_CASE("order-2 blocks expand the Kronecker structure") {
  QueueModel m = test::map2_model(0.25, 1.0);
  LevelBlocks blk = m.blocks_at(1);
  // down block at level 1: d2 (x) I2 plus the impatience shift on the diagonal
  Matrix expected = kron_product(test::map2_d2(), Matrix::identity(2));
  expected.shift_diagonal(0.25);
  REQUIRE(test::max_abs_diff(blk.down, expected) == 0.0);
  // up block carries the A arrivals in every level
  REQUIRE(test::max_abs_diff(blk.up, kron_product(Matrix::identity(2), test::map2_d1())) ==
          0.0);
}

TEST_CASE("level zero local block carries no impatience") {
  QueueModel m = test::map2_model(0.7, 0.9);
  LevelBlocks blk = m.blocks_at(0);
  REQUIRE(test::max_abs_diff(blk.local, kron_sum(test::map2_c2(), test::map2_c1())) == 0.0);
  REQUIRE(test::max_abs_diff(m.upward_local(0),
                             kron_product(Matrix::identity(2), test::map2_c1())) == 0.0);
  REQUIRE(test::max_abs_diff(m.downward_local(0),
                             kron_product(test::map2_c2(), Matrix::identity(2))) == 0.0);
}

TEST_CASE("drift rates") {
  QueueModel m = test::map2_model(1.0, 1.0);
  SECTION("upper side grows the downward pull") {
    auto [up, down] = m.drift_rates(2);
    REQUIRE(std::abs(up - 5.0) < 1e-12);
    REQUIRE(std::abs(down - (4.0 + 5.0 / 9.0 + 2.0)) < 1e-12);
  }
  SECTION("lower side grows the upward pull") {
    QueueModel p = test::poisson_model(1.0, 2.0, 0.0, 2.0);
    auto [up, down] = p.drift_rates(-3);
    REQUIRE(std::abs(up - 7.0) < 1e-12);
    REQUIRE(std::abs(down - 2.0) < 1e-12);
  }
  SECTION("no impatience keeps the base rates at every level") {
    QueueModel p = test::poisson_model(3.0, 2.0, 0.0, 0.0);
    for (std::int64_t k : {-5, -1, 1, 9}) {
      auto [up, down] = p.drift_rates(k);
      REQUIRE(up == 3.0);
      REQUIRE(down == 2.0);
    }
  }
  SECTION("the boundary level has no drift pair") {
    REQUIRE_THROWS_AS(m.drift_rates(0), ConfigError);
  }
}

TEST_CASE("phase-averaged block identities hold on random models") {
  test::Rng rng(41);
  for (int trial = 0; trial < 8; ++trial) {
    MarkovianArrivalProcess a = test::random_map(rng, 1 + rng.next_index(3));
    MarkovianArrivalProcess b = test::random_map(rng, 1 + rng.next_index(3));
    const double th1 = 0.1 + rng.next_unit();
    const double th2 = 0.1 + rng.next_unit();
    QueueModel m(a, b, th1, th2);
    const MapSummary sa = summarize(a);
    const MapSummary sb = summarize(b);
    // stationary joint phase vector: alpha_b (x) alpha_a
    Vector joint(m.block_order());
    for (std::size_t i = 0; i < b.order; ++i)
      for (std::size_t j = 0; j < a.order; ++j)
        joint[i * a.order + j] = sb.alpha[i] * sa.alpha[j];
    Vector ones = Vector::ones(m.block_order());
    for (std::int64_t k : {1, 2, 5, 17, 50}) {
      LevelBlocks blk = m.blocks_at(k);
      REQUIRE(std::abs(dot(joint * blk.up, ones) - sa.rate) < 1e-10);
      REQUIRE(std::abs(dot(joint * blk.down, ones) - (sb.rate + k * th1)) < 1e-10);
      LevelBlocks neg = m.blocks_at(-k);
      REQUIRE(std::abs(dot(joint * neg.up, ones) - (sa.rate + k * th2)) < 1e-10);
      REQUIRE(std::abs(dot(joint * neg.down, ones) - sb.rate) < 1e-10);
    }
    // the joint phase vector is stationary for the level-free generator
    Matrix level_free = kron_sum(b.c + b.d, a.c + a.d);
    REQUIRE((joint * level_free).inf_norm() < 1e-10);
  }
}

TEST_CASE("local diagonal stays strictly negative deep into the level range") {
  QueueModel m = test::map2_model(0.3, 0.8);
  for (std::int64_t k : {1LL, 100LL, 10000LL, 1000000LL}) {
    LevelBlocks up_side = m.blocks_at(k);
    LevelBlocks down_side = m.blocks_at(-k);
    for (std::size_t i = 0; i < m.block_order(); ++i) {
      REQUIRE(up_side.local(i, i) < 0.0);
      REQUIRE(down_side.local(i, i) < 0.0);
    }
  }
}
