#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "matchq/model_io.hpp"
#include "test_support.hpp"

using namespace matchq;

TEST_CASE("full matrix model file") {
  nlohmann::json j = {
      {"map_a", {{"c", {{-10, 0}, {1, -1}}}, {"d", {{9, 1}, {0, 0}}}}},
      {"map_b", {{"c", {{-5, 1}, {2, -7}}}, {"d", {{0, 4}, {2, 3}}}}},
      {"theta1", 0.25},
      {"theta2", 1.0}};
  ParsedModel parsed = parse_model_json(j);
  REQUIRE(parsed.model.block_order() == 4);
  REQUIRE(parsed.model.theta1() == 0.25);
  REQUIRE(std::abs(parsed.model.summary_a().rate - 5.0) < 1e-12);
  REQUIRE(parsed.solver.epsilon == 1e-20);
}

TEST_CASE("poisson and erlang shorthand") {
  nlohmann::json j = {{"map_a", {{"poisson", 5.0}}},
                      {"map_b", {{"erlang", {2, 4.0}}}},
                      {"theta1", 0.1},
                      {"theta2", 0.2}};
  ParsedModel parsed = parse_model_json(j);
  REQUIRE(parsed.model.map_a().order == 1);
  REQUIRE(parsed.model.map_b().order == 2);
  REQUIRE(std::abs(parsed.model.summary_b().rate - 2.0) < 1e-12);
}

TEST_CASE("solver overrides") {
  nlohmann::json j = {{"map_a", {{"poisson", 1.0}}},
                      {"map_b", {{"poisson", 2.0}}},
                      {"theta1", 1.0},
                      {"theta2", 2.0},
                      {"solver", {{"epsilon", 1e-12}, {"schedule_step", 5},
                                  {"series_tol", 1e-10}}}};
  ParsedModel parsed = parse_model_json(j);
  REQUIRE(parsed.solver.epsilon == 1e-12);
  REQUIRE(parsed.solver.series_tol == 1e-10);
  REQUIRE(parsed.solver.level_schedule.front() == 5);
  REQUIRE(parsed.solver.level_schedule[1] == 10);
}

TEST_CASE("parse errors carry the field path") {
  SECTION("missing map") {
    nlohmann::json j = {{"map_a", {{"poisson", 1.0}}}, {"theta1", 1.0}, {"theta2", 1.0}};
    try {
      parse_model_json(j);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      REQUIRE(std::string(e.what()).find("map_b") != std::string::npos);
    }
  }
  SECTION("ragged matrix") {
    nlohmann::json j = {{"map_a", {{"c", {{-1.0, 0.0}, {0.0}}}, {"d", {{1, 0}, {0, 1}}}}},
                        {"map_b", {{"poisson", 1.0}}},
                        {"theta1", 1.0},
                        {"theta2", 1.0}};
    try {
      parse_model_json(j);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      REQUIRE(std::string(e.what()).find("map_a.c") != std::string::npos);
    }
  }
  SECTION("missing theta") {
    nlohmann::json j = {{"map_a", {{"poisson", 1.0}}}, {"map_b", {{"poisson", 1.0}}},
                        {"theta1", 1.0}};
    try {
      parse_model_json(j);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      REQUIRE(std::string(e.what()).find("theta2") != std::string::npos);
    }
  }
  SECTION("invalid model content surfaces the validation error") {
    nlohmann::json j = {{"map_a", {{"c", {{-1.0}}}, {"d", {{2.0}}}}},
                        {"map_b", {{"poisson", 1.0}}},
                        {"theta1", 1.0},
                        {"theta2", 1.0}};
    REQUIRE_THROWS_AS(parse_model_json(j), MapValidationError);
  }
}

TEST_CASE("report serialization carries every field") {
  PerformanceReport rep;
  rep.p_no_a = 0.25;
  rep.mean_q_composite = 1.5;
  rep.k_star = 40;
  nlohmann::json j = to_json(rep);
  REQUIRE(j["p_no_a"] == 0.25);
  REQUIRE(j["mean_q_composite"] == 1.5);
  REQUIRE(j["k_star"] == 40);
  REQUIRE(j.contains("tail_mass"));
  REQUIRE(j.contains("mean_level_diff"));
}

TEST_CASE("sim report serialization carries intervals") {
  SimReport rep;
  rep.mean_level_diff = {-0.38, 0.002};
  rep.events = 123;
  nlohmann::json j = to_json(rep);
  REQUIRE(j["mean_level_diff"]["value"] == -0.38);
  REQUIRE(j["mean_level_diff"]["half_width"] == 0.002);
  REQUIRE(j["events"] == 123);
}
