#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "fairdiv/core.hpp"
#include "fairdiv/guessing.hpp"
#include "fairdiv/random.hpp"

namespace fairdiv {

struct LinearRow {
  enum class Sense { GE, LE };
  Sense sense = Sense::LE;
  std::vector<std::pair<std::size_t, double>> coefs;
  double rhs = 0.0;
};

/// Feasibility system for a guess gamma: for each group, the x-mass on the
/// group is at least k_i; for each point p, the x-mass on the open ball
/// B(p, gamma/2) is at most 1; x >= 0.
struct LPInstance {
  std::size_t num_vars = 0;
  double gamma = 0.0;
  std::vector<LinearRow> rows;  // group rows first, then one ball row per point
  std::size_t num_group_rows = 0;
};

LPInstance build_lp(const Dataset& data, const FairnessSpec& spec, double gamma);

/// One row per line: `GE|LE idx:coef,... rhs`.
void write_lp(std::ostream& out, const LPInstance& lp);

inline constexpr double kLpTolerance = 1e-9;
inline constexpr double kSupportThreshold = 1e-12;

struct FractionalSolution {
  std::vector<double> x;
  bool feasible = false;
  std::vector<std::size_t> support;  // x_j > kSupportThreshold
  std::size_t pivots = 0;
};

/// Phase-1 simplex with Bland's rule. Deterministic. Throws Error when the
/// final point fails the constraints by more than kLpTolerance.
FractionalSolution solve_feasibility(const LPInstance& lp);

/// Largest violation of any row (0 when satisfied).
double max_violation(const LPInstance& lp, const std::vector<double>& x);

/// Sequential sampling without replacement with probability proportional to
/// weight. Returns the positions of `weights`, in sampled order; entries
/// with zero weight are left out.
std::vector<std::size_t> weighted_permutation(const std::vector<double>& weights, Rng& rng);

/// Keeps p_j when it comes first in the random order among the support
/// points of B(p_j, radius).
std::vector<std::size_t> round_by_order(const Dataset& data, const std::vector<double>& weights, double radius,
                                        Rng& rng);

/// Rounding with radius gamma/2; each group meets its quota in expectation.
Solution round_expected_fair(const Dataset& data, const FairnessSpec& spec, double gamma,
                             const std::vector<double>& x, Rng& rng);

struct RedistributedSolution {
  std::vector<double> y;
  double gamma = 0.0;
};

/// Moves the weight of same-group points within gamma/3 onto the first such
/// point in index order, so supports within a group become gamma/3-separated.
RedistributedSolution redistribute_weights(const Dataset& data, const FairnessSpec& spec, double gamma,
                                           const std::vector<double>& x);

/// Rounding with radius gamma/6 repeated up to max(1, ceil(log2(1/delta)))
/// times. Returns the first trial with ceil((1-eps)k_i) points per group, or
/// else the trial with the best minimum fill ratio.
Solution round_concentrated(const Dataset& data, const FairnessSpec& spec, double gamma,
                            const std::vector<double>& y, double eps, double delta, Rng& rng);

std::size_t concentrated_trials(double delta);

/// True when every k_i > 0 satisfies k_i >= 3 eps^-2 ln(2m).
bool concentration_regime(const FairnessSpec& spec, double eps);

enum class RoundingMode { Expected2, Concentrated6 };

struct LpSearchResult {
  double gamma = 0.0;
  FractionalSolution fractional;
  std::size_t lp_solves = 0;
};

/// Largest LP-feasible value of `schedule`, with the solution found there.
std::optional<LpSearchResult> lp_search(const Dataset& data, const FairnessSpec& spec,
                                        const GuessSchedule& schedule);

struct LpPipelineOptions {
  RoundingMode mode = RoundingMode::Expected2;
  double eps = 0.5;    // fairness slack for Concentrated6
  double delta = 0.1;  // failure probability for Concentrated6
  std::uint64_t seed = 0;
  /// When set, search the geometric grid with this ratio instead of all pairwise distances.
  std::optional<double> grid_eps;
};

/// Drops points from groups above their quota, each time the one with the
/// closest selected neighbour (lowest index on ties). Diversity cannot drop.
Solution trim_to_quotas(const Dataset& data, const FairnessSpec& spec, const Solution& solution);

/// Rounds an already searched LP solution, then trims to the quotas.
Solution lp_round(const Dataset& data, const FairnessSpec& spec, const LpSearchResult& found,
                  const LpPipelineOptions& options);

/// Search, then round at the largest feasible guess. Throws when no guess is feasible.
Solution lp_pipeline(const Dataset& data, const FairnessSpec& spec, const LpPipelineOptions& options);

}  // namespace fairdiv
