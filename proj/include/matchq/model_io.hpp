#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>

#include <json.hpp>

#include "matchq/errors.hpp"
#include "matchq/map_process.hpp"
#include "matchq/performance.hpp"
#include "matchq/qbd_solver.hpp"
#include "matchq/queue_model.hpp"
#include "matchq/simulator.hpp"

namespace matchq {

/// A model file parse failure, with the field path (or byte offset for raw
/// syntax errors) in the message.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error(what) {}
};

struct ParsedModel {
  QueueModel model;
  SolverConfig solver;
};

namespace detail {

inline Matrix matrix_from_json(const nlohmann::json& j, const std::string& path) {
  if (!j.is_array() || j.empty())
    throw ParseError(path + ": expected a nonempty array of rows");
  const std::size_t rows = j.size();
  if (!j[0].is_array()) throw ParseError(path + ": rows must be arrays");
  const std::size_t cols = j[0].size();
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (!j[i].is_array() || j[i].size() != cols)
      throw ParseError(path + ": row " + std::to_string(i) + " has wrong length");
    for (std::size_t k = 0; k < cols; ++k) {
      if (!j[i][k].is_number())
        throw ParseError(path + ": entry (" + std::to_string(i) + "," +
                         std::to_string(k) + ") is not a number");
      m(i, k) = j[i][k].get<double>();
    }
  }
  return m;
}

inline MarkovianArrivalProcess map_from_json(const nlohmann::json& j,
                                             const std::string& path) {
  if (!j.is_object()) throw ParseError(path + ": expected an object");
  if (j.contains("poisson")) {
    if (!j["poisson"].is_number()) throw ParseError(path + ".poisson: expected a rate");
    return poisson(j["poisson"].get<double>());
  }
  if (j.contains("erlang")) {
    const auto& e = j["erlang"];
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number() ||
        e[0].get<long long>() < 1)
      throw ParseError(path + ".erlang: expected [stages, stage_rate]");
    return erlang(e[0].get<std::size_t>(), e[1].get<double>());
  }
  if (j.contains("c") && j.contains("d")) {
    Matrix c = matrix_from_json(j["c"], path + ".c");
    Matrix d = matrix_from_json(j["d"], path + ".d");
    return validate(std::move(c), std::move(d));
  }
  throw ParseError(path + ": expected {c, d}, {poisson: rate} or {erlang: [stages, rate]}");
}

inline double number_field(const nlohmann::json& j, const std::string& key) {
  if (!j.contains(key)) throw ParseError(key + ": missing required field");
  if (!j[key].is_number()) throw ParseError(key + ": expected a number");
  return j[key].get<double>();
}

}  // namespace detail

/// Parses a model description. Schema:
/// {
///   "map_a": {"c": [[...]], "d": [[...]]} | {"poisson": rate}
///            | {"erlang": [stages, stage_rate]},
///   "map_b": ...,
///   "theta1": rate, "theta2": rate,
///   "solver": {"epsilon": ..., "schedule_step": ..., "series_tol": ...}  // optional
/// }
inline ParsedModel parse_model_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("model file: top level must be an object");
  if (!j.contains("map_a")) throw ParseError("map_a: missing required field");
  if (!j.contains("map_b")) throw ParseError("map_b: missing required field");
  MarkovianArrivalProcess a = detail::map_from_json(j["map_a"], "map_a");
  MarkovianArrivalProcess b = detail::map_from_json(j["map_b"], "map_b");
  const double theta1 = detail::number_field(j, "theta1");
  const double theta2 = detail::number_field(j, "theta2");

  SolverConfig cfg;
  if (j.contains("solver")) {
    const auto& s = j["solver"];
    if (!s.is_object()) throw ParseError("solver: expected an object");
    if (s.contains("epsilon")) cfg.epsilon = s["epsilon"].get<double>();
    if (s.contains("series_tol")) cfg.series_tol = s["series_tol"].get<double>();
    if (s.contains("schedule_step")) {
      const int step = s["schedule_step"].get<int>();
      if (step < 2) throw ParseError("solver.schedule_step: must be >= 2");
      cfg.level_schedule.clear();
      for (int n = 0; n < cfg.max_schedule_steps; ++n)
        cfg.level_schedule.push_back(step * (n + 1));
    }
    if (s.contains("max_schedule_steps"))
      cfg.max_schedule_steps = s["max_schedule_steps"].get<int>();
  }
  return ParsedModel{QueueModel(std::move(a), std::move(b), theta1, theta2), cfg};
}

inline ParsedModel load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
  return parse_model_json(j);
}

inline nlohmann::json to_json(const PerformanceReport& r) {
  return nlohmann::json{{"p_no_a", r.p_no_a},
                        {"p_no_b", r.p_no_b},
                        {"p_empty", r.p_empty},
                        {"mean_q_a", r.mean_q_a},
                        {"mean_q_b", r.mean_q_b},
                        {"mean_q_composite", r.mean_q_composite},
                        {"mean_q_total_abs", r.mean_q_total_abs},
                        {"mean_level_diff", r.mean_level_diff},
                        {"k_star", r.k_star},
                        {"tail_mass", r.tail_mass},
                        {"truncation_error_bound", r.truncation_error_bound}};
}

inline nlohmann::json to_json(const Estimate& e) {
  return nlohmann::json{{"value", e.value}, {"half_width", e.half_width}};
}

inline nlohmann::json to_json(const SimReport& r) {
  return nlohmann::json{{"p_no_a", to_json(r.p_no_a)},
                        {"p_no_b", to_json(r.p_no_b)},
                        {"p_empty", to_json(r.p_empty)},
                        {"mean_q_a", to_json(r.mean_q_a)},
                        {"mean_q_b", to_json(r.mean_q_b)},
                        {"mean_q_composite", to_json(r.mean_q_composite)},
                        {"mean_q_total_abs", to_json(r.mean_q_total_abs)},
                        {"mean_level_diff", to_json(r.mean_level_diff)},
                        {"mean_wait_a", to_json(r.mean_wait_a)},
                        {"abandon_frac_a", r.abandon_frac_a},
                        {"abandon_frac_b", r.abandon_frac_b},
                        {"events", r.events}};
}

}  // namespace matchq
