#include "fairdiv/guessing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fairdiv {

GuessSchedule pairwise_guesses(const Dataset& data, std::span<const std::size_t> subset) {
  GuessSchedule s;
  for (std::size_t a = 0; a < subset.size(); ++a) {
    for (std::size_t b = a + 1; b < subset.size(); ++b) {
      const double d = data.dist(subset[a], subset[b]);
      if (d > 0.0) s.values.push_back(d);
    }
  }
  std::sort(s.values.begin(), s.values.end());
  s.values.erase(std::unique(s.values.begin(), s.values.end()), s.values.end());
  if (s.values.empty()) throw Error("no positive pairwise distance: all points coincide");
  return s;
}

GuessSchedule pairwise_guesses(const Dataset& data) {
  std::vector<std::size_t> all(data.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return pairwise_guesses(data, all);
}

GuessSchedule geometric_guesses(double d_lo, double d_hi, double eps) {
  if (!(d_lo > 0.0) || !(d_hi >= d_lo) || !(eps > 0.0)) {
    throw Error("geometric schedule needs 0 < d_lo <= d_hi and eps > 0");
  }
  GuessSchedule s;
  s.kind = ScheduleKind::Geometric;
  for (std::size_t t = 0;; ++t) {
    const double v = d_lo * std::pow(1.0 + eps, static_cast<double>(t));
    if (v >= d_hi) {
      s.values.push_back(d_hi);
      break;
    }
    s.values.push_back(v);
  }
  return s;
}

std::optional<std::pair<double, double>> distance_range(const Dataset& data) {
  double lo = kUnbounded, hi = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (std::size_t j = i + 1; j < data.size(); ++j) {
      const double d = data.dist(i, j);
      if (d > 0.0) lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
  }
  if (!(hi > 0.0)) return std::nullopt;
  return std::make_pair(lo, hi);
}

std::optional<double> largest_feasible(const GuessSchedule& schedule, const Predicate& feasible) {
  const auto& v = schedule.values;
  // Invariant: v[lo-1] feasible (or lo == 0), v[hi] infeasible (or hi == size).
  std::size_t lo = 0, hi = v.size();
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (feasible(v[mid])) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  if (lo == 0) return std::nullopt;
  return v[lo - 1];
}

std::optional<double> largest_feasible_scan(const GuessSchedule& schedule, const Predicate& feasible) {
  for (auto it = schedule.values.rbegin(); it != schedule.values.rend(); ++it) {
    if (feasible(*it)) return *it;
  }
  return std::nullopt;
}

bool better_solution(const Solution& a, const Solution& b) {
  if (a.diversity != b.diversity) return a.diversity > b.diversity;
  return a.selected < b.selected;
}

}  // namespace fairdiv
