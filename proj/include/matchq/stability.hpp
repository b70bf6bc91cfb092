#pragma once

#include <cmath>
#include <string>

#include "matchq/errors.hpp"
#include "matchq/queue_model.hpp"

namespace matchq {

enum class Recurrence { PositiveRecurrent, NullRecurrent, Transient };

struct RecurrenceClass {
  Recurrence tag;
  std::string rationale;  // which classification rule applied
};

inline const char* to_string(Recurrence r) {
  switch (r) {
    case Recurrence::PositiveRecurrent: return "PositiveRecurrent";
    case Recurrence::NullRecurrent: return "NullRecurrent";
    case Recurrence::Transient: return "Transient";
  }
  return "?";
}

/// Recurrence trichotomy of the level process from the four scalar rates.
/// Any positive impatience on both sides forces positive recurrence; with no
/// impatience the walk is a free two-sided random walk (transient unless the
/// rates balance); one-sided impatience stabilizes only its own side.
/// Arrival-rate equality is tested with relative tolerance 1e-9 because the
/// rates come out of a numerical stationary solve.
inline RecurrenceClass classify(double lambda1, double lambda2, double theta1,
                                double theta2) {
  if (lambda1 <= 0.0 || lambda2 <= 0.0 || theta1 < 0.0 || theta2 < 0.0)
    throw ConfigError("classify: arrival rates must be positive, impatience rates nonnegative");

  const double scale = std::max(lambda1, lambda2);
  const bool rates_equal = std::abs(lambda1 - lambda2) <= 1e-9 * scale;

  if (theta1 > 0.0 && theta2 > 0.0)
    return {Recurrence::PositiveRecurrent, "Theorem 1"};

  if (theta1 == 0.0 && theta2 == 0.0) {
    if (rates_equal) return {Recurrence::NullRecurrent, "Corollary 1"};
    return {Recurrence::Transient, "Corollary 1"};
  }

  if (theta1 > 0.0) {  // theta2 == 0: only the A side drains itself
    if (rates_equal) return {Recurrence::NullRecurrent, "Corollary 2"};
    if (lambda1 > lambda2) return {Recurrence::PositiveRecurrent, "Corollary 2"};
    return {Recurrence::Transient, "Corollary 2"};
  }

  // theta1 == 0, theta2 > 0: mirror of the previous case.
  if (rates_equal) return {Recurrence::NullRecurrent, "Corollary 2 (mirrored)"};
  if (lambda2 > lambda1) return {Recurrence::PositiveRecurrent, "Corollary 2 (mirrored)"};
  return {Recurrence::Transient, "Corollary 2 (mirrored)"};
}

inline RecurrenceClass classify(const QueueModel& model) {
  return classify(model.summary_a().rate, model.summary_b().rate, model.theta1(),
                  model.theta2());
}

}  // namespace matchq
