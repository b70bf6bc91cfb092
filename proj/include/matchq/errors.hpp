#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace matchq {

/// Base class for every error thrown by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Mismatched or invalid matrix/vector dimensions.
class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& what) : Error(what) {}
};

/// A direct solve hit a pivot below the singularity threshold.
class SingularMatrixError : public Error {
 public:
  SingularMatrixError(const std::string& what, double pivot_magnitude)
      : Error(what), pivot_magnitude(pivot_magnitude) {}
  double pivot_magnitude;
};

/// A generator expected to be irreducible is not (or is numerically degenerate).
class NotIrreducibleError : public Error {
 public:
  explicit NotIrreducibleError(const std::string& what) : Error(what) {}
};

/// Arrival-process validation failure.
class MapValidationError : public Error {
 public:
  enum class Kind { RowSumViolation, NegativeEntry, Reducible, ZeroArrivalMatrix, BadParameter };
  MapValidationError(Kind kind, const std::string& what, std::size_t worst_row = 0)
      : Error(what), kind(kind), worst_row(worst_row) {}
  Kind kind;
  std::size_t worst_row;
};

/// Solver preconditions require a positive recurrent model.
class NotStableError : public Error {
 public:
  explicit NotStableError(const std::string& what) : Error(what) {}
};

/// The truncation-level schedule ran out before the tail-mass stop condition held.
/// Carries the (level, tail mass) pairs seen, for diagnostics.
class ScheduleExhaustedError : public Error {
 public:
  ScheduleExhaustedError(const std::string& what, std::vector<std::pair<int, double>> tails)
      : Error(what), tail_masses(std::move(tails)) {}
  std::vector<std::pair<int, double>> tail_masses;
};

/// The doubling series failed to converge within the term cap.
class NonConvergentError : public Error {
 public:
  explicit NonConvergentError(const std::string& what) : Error(what) {}
};

/// Invalid solver or simulation configuration.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(what) {}
};

}  // namespace matchq
