#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "fairdiv/core.hpp"

namespace fairdiv {

enum class ScheduleKind { Pairwise, Geometric };

/// Candidate values for the optimum, strictly increasing and positive.
struct GuessSchedule {
  std::vector<double> values;
  ScheduleKind kind = ScheduleKind::Pairwise;

  std::size_t size() const { return values.size(); }
  bool empty() const { return values.empty(); }
};

/// Sorted distinct positive pairwise distances. Throws if there are none.
GuessSchedule pairwise_guesses(const Dataset& data);

/// Same, restricted to the given points.
GuessSchedule pairwise_guesses(const Dataset& data, std::span<const std::size_t> subset);

/// d_lo (1+eps)^t for t = 0, 1, ... up to the first value >= d_hi, which is
/// replaced by d_hi itself.
GuessSchedule geometric_guesses(double d_lo, double d_hi, double eps);

/// Smallest positive and largest pairwise distance; none if all points coincide.
std::optional<std::pair<double, double>> distance_range(const Dataset& data);

using Predicate = std::function<bool(double)>;

/// Binary search for the largest value passing a monotone predicate.
std::optional<double> largest_feasible(const GuessSchedule& schedule, const Predicate& feasible);

/// Linear scan from the top; agrees with largest_feasible for monotone predicates.
std::optional<double> largest_feasible_scan(const GuessSchedule& schedule, const Predicate& feasible);

/// Orders candidate solutions: larger diversity first, then the
/// lexicographically smaller index set.
bool better_solution(const Solution& a, const Solution& b);

}  // namespace fairdiv
