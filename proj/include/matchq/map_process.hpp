#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>

#include "matchq/errors.hpp"
#include "matchq/linalg.hpp"

namespace matchq {

/// A Markovian arrival process (C, D): C holds phase transitions without an
/// arrival, D holds transitions that emit an arrival. Immutable once built;
/// construct through validate(), poisson() or erlang().
struct MarkovianArrivalProcess {
  Matrix c;
  Matrix d;
  std::size_t order = 0;
};

/// Stationary phase distribution and arrival rate of a MAP.
struct MapSummary {
  Vector alpha;
  double rate = 0.0;
};

/// Validates a candidate (c, d) pair and returns it as a MAP. The checks are
/// strict: nothing is repaired.
///   - d >= 0 elementwise and d != 0
///   - c has strictly negative diagonal and nonnegative off-diagonal
///   - (c + d) e = 0 within 1e-12
///   - c + d irreducible on its nonzero pattern
inline MarkovianArrivalProcess validate(Matrix c, Matrix d) {
  if (!c.square() || !d.square() || c.rows() != d.rows())
    throw DimensionError("validate: c and d must be square with equal order");
  const std::size_t m = c.rows();
  if (m == 0) throw DimensionError("validate: empty matrices");

  bool d_nonzero = false;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      if (d(i, j) < 0.0)
        throw MapValidationError(MapValidationError::Kind::NegativeEntry,
                                 "arrival matrix has a negative entry at row " +
                                     std::to_string(i),
                                 i);
      if (d(i, j) > 0.0) d_nonzero = true;
    }
  if (!d_nonzero)
    throw MapValidationError(MapValidationError::Kind::ZeroArrivalMatrix,
                             "arrival matrix is identically zero");

  for (std::size_t i = 0; i < m; ++i) {
    if (!(c(i, i) < 0.0))
      throw MapValidationError(MapValidationError::Kind::NegativeEntry,
                               "hidden-transition matrix needs a strictly negative "
                               "diagonal; row " + std::to_string(i) + " violates it",
                               i);
    for (std::size_t j = 0; j < m; ++j)
      if (i != j && c(i, j) < 0.0)
        throw MapValidationError(MapValidationError::Kind::NegativeEntry,
                                 "hidden-transition matrix has a negative off-diagonal "
                                 "entry at row " + std::to_string(i),
                                 i);
  }

  double worst = 0.0;
  std::size_t worst_row = 0;
  for (std::size_t i = 0; i < m; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < m; ++j) s += c(i, j) + d(i, j);
    if (std::abs(s) > worst) { worst = std::abs(s); worst_row = i; }
  }
  if (worst > 1e-12)
    throw MapValidationError(MapValidationError::Kind::RowSumViolation,
                             "(c + d) rows must sum to zero; row " +
                                 std::to_string(worst_row) + " sums to " +
                                 std::to_string(worst),
                             worst_row);

  Matrix gen = c + d;
  if (m > 1 && !detail::strongly_connected(gen))
    throw MapValidationError(MapValidationError::Kind::Reducible,
                             "c + d is reducible");

  return MarkovianArrivalProcess{std::move(c), std::move(d), m};
}

/// A Poisson process as the order-1 special case.
inline MarkovianArrivalProcess poisson(double rate) {
  if (!(rate > 0.0))
    throw MapValidationError(MapValidationError::Kind::BadParameter,
                             "poisson: rate must be positive");
  Matrix c(1, 1), d(1, 1);
  c(0, 0) = -rate;
  d(0, 0) = rate;
  return MarkovianArrivalProcess{std::move(c), std::move(d), 1};
}

/// A renewal process with Erlang interarrival times: stage_rate on the
/// superdiagonal of c, an arrival restarting at stage 0 from the last stage.
inline MarkovianArrivalProcess erlang(std::size_t stages, double stage_rate) {
  if (stages < 1)
    throw MapValidationError(MapValidationError::Kind::BadParameter,
                             "erlang: need at least one stage");
  if (!(stage_rate > 0.0))
    throw MapValidationError(MapValidationError::Kind::BadParameter,
                             "erlang: stage rate must be positive");
  Matrix c(stages, stages), d(stages, stages);
  for (std::size_t i = 0; i < stages; ++i) {
    c(i, i) = -stage_rate;
    if (i + 1 < stages) c(i, i + 1) = stage_rate;
  }
  d(stages - 1, 0) = stage_rate;
  return MarkovianArrivalProcess{std::move(c), std::move(d), stages};
}

/// Stationary phase vector of c + d and the resulting arrival rate alpha*d*e.
inline MapSummary summarize(const MarkovianArrivalProcess& map) {
  Vector alpha = stationary_vector(map.c + map.d);
  const double rate = dot(alpha * map.d, Vector::ones(map.order));
  return MapSummary{std::move(alpha), rate};
}

}  // namespace matchq
