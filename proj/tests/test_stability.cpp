#include <catch2/catch_amalgamated.hpp>

#include "matchq/stability.hpp"
#include "test_support.hpp"

using namespace matchq;

TEST_CASE("classification trichotomy") {
  struct Case {
    double l1, l2, th1, th2;
    Recurrence expected;
  };
  const Case cases[] = {
      {5.0, 4.0 + 5.0 / 9.0, 0.25, 1.0, Recurrence::PositiveRecurrent},
      {1.0, 9.0, 2.0, 3.0, Recurrence::PositiveRecurrent},
      {1.0, 1.0, 0.0, 0.0, Recurrence::NullRecurrent},
      {1.0, 2.0, 0.0, 0.0, Recurrence::Transient},
      {2.0, 1.0, 0.0, 0.0, Recurrence::Transient},
      {1.0, 1.0, 0.5, 0.0, Recurrence::NullRecurrent},
      {2.0, 1.0, 0.5, 0.0, Recurrence::PositiveRecurrent},
      {1.0, 2.0, 0.5, 0.0, Recurrence::Transient},
      {1.0, 1.0, 0.0, 0.5, Recurrence::NullRecurrent},
      {1.0, 2.0, 0.0, 0.5, Recurrence::PositiveRecurrent},
      {2.0, 1.0, 0.0, 0.5, Recurrence::Transient},
      {7.0, 7.0, 1.0, 0.0001, Recurrence::PositiveRecurrent},
  };
  for (const Case& c : cases) {
    CAPTURE(c.l1, c.l2, c.th1, c.th2);
    REQUIRE(classify(c.l1, c.l2, c.th1, c.th2).tag == c.expected);
  }
}

TEST_CASE("rationale names the rule") {
  REQUIRE(classify(1.0, 2.0, 0.5, 0.5).rationale == "Theorem 1");
  REQUIRE(classify(1.0, 2.0, 0.0, 0.0).rationale == "Corollary 1");
  REQUIRE(classify(1.0, 2.0, 0.5, 0.0).rationale == "Corollary 2");
}

TEST_CASE("near-equal rates fall under the tolerance rule") {
  REQUIRE(classify(1.0, 1.0 + 1e-15, 0.0, 0.0).tag == Recurrence::NullRecurrent);
  REQUIRE(classify(1.0, 1.0 + 1e-15, 0.5, 0.0).tag == Recurrence::NullRecurrent);
  REQUIRE(classify(1.0, 1.0 + 1e-6, 0.0, 0.0).tag == Recurrence::Transient);
}

TEST_CASE("classification is symmetric under side swap") {
  test::Rng rng(9);
  for (int trial = 0; trial < 30; ++trial) {
    const double l1 = 0.1 + 5.0 * rng.next_unit();
    const double l2 = 0.1 + 5.0 * rng.next_unit();
    const double th1 = rng.next_index(2) ? rng.next_unit() : 0.0;
    const double th2 = rng.next_index(2) ? rng.next_unit() : 0.0;
    REQUIRE(classify(l1, l2, th1, th2).tag == classify(l2, l1, th2, th1).tag);
  }
}

TEST_CASE("both impatience rates positive is always stable") {
  test::Rng rng(15);
  for (int trial = 0; trial < 30; ++trial) {
    const double l1 = 0.01 + 10.0 * rng.next_unit();
    const double l2 = 0.01 + 10.0 * rng.next_unit();
    REQUIRE(classify(l1, l2, 1e-6 + rng.next_unit(), 1e-6 + rng.next_unit()).tag ==
            Recurrence::PositiveRecurrent);
  }
}

TEST_CASE("stable one-sided cases show a dominating downward drift") {
  // whenever classification is positive recurrent with th1 > 0, some level has
  // more downward than upward pull
  test::Rng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const double l1 = 0.1 + 5.0 * rng.next_unit();
    const double l2 = 0.1 + 5.0 * rng.next_unit();
    const double th1 = 0.05 + rng.next_unit();
    if (classify(l1, l2, th1, 0.0).tag != Recurrence::PositiveRecurrent) continue;
    QueueModel m = test::poisson_model(l1, l2, th1, 0.0);
    const std::int64_t k =
        static_cast<std::int64_t>(std::max(1.0, (l1 - l2) / th1)) + 1;
    auto [up, down] = m.drift_rates(k);
    REQUIRE(down > up);
  }
}

TEST_CASE("invalid rates rejected") {
  REQUIRE_THROWS_AS(classify(0.0, 1.0, 0.1, 0.1), ConfigError);
  REQUIRE_THROWS_AS(classify(1.0, 1.0, -0.1, 0.1), ConfigError);
}

TEST_CASE("model overload uses the arrival summaries") {
  REQUIRE(classify(test::map2_model(0.25, 1.0)).tag == Recurrence::PositiveRecurrent);
  QueueModel free_model(test::map2_a(), test::map2_b(), 0.0, 0.0);
  REQUIRE(classify(free_model).tag == Recurrence::Transient);  // rates 5 vs 41/9
}
