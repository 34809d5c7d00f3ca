#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <vector>

#include "fairdiv/core.hpp"
#include "fairdiv/random.hpp"

namespace fairdiv {

// ---- exact algorithm on a line ----

/// Quota-exact set with every gap >= gamma, or none. Needs 1-D coordinates.
std::optional<Solution> fair_line(const Dataset& data, const FairnessSpec& spec, double gamma);

/// Exact optimum on a line via the pairwise guess schedule.
Solution fair_line_opt(const Dataset& data, const FairnessSpec& spec);

// ---- farthest-point traversal and coresets ----

/// order[0] is the seed; radii[t] is the distance from order[t] to
/// order[0..t), with radii[0] = +inf.
struct GmmOrdering {
  std::vector<std::size_t> order;
  std::vector<double> radii;

  std::size_t size() const { return order.size(); }
};

/// Farthest-point traversal over `points` until `target` points are chosen
/// (or the set runs out). Starts from `init` when given, else from the
/// lowest index. Ties go to the lowest index.
GmmOrdering gmm(const Dataset& data, std::span<const std::size_t> points, std::size_t target,
                std::span<const std::size_t> init = {});

/// Longest prefix whose insertion radii stay >= threshold.
std::vector<std::size_t> maximal_prefix(const GmmOrdering& ordering, double threshold);

/// ceil((4/eps')^lambda k) with eps' = eps/(1+eps).
std::size_t coreset_bound(std::size_t k, double eps, double lambda);

/// Per-group orderings, one per group (empty for groups with no points).
struct CoresetBundle {
  std::vector<GmmOrdering> groups;
  double eps = 0.0;
  double lambda = 0.0;
  std::size_t bound = 0;

  /// Sorted union of all retained indices.
  std::vector<std::size_t> points() const;
};

/// lambda <= 0 means "use the dimension" (Euclidean data only).
CoresetBundle build_coreset(const Dataset& data, const FairnessSpec& spec, double eps, double lambda = 0.0);

double resolve_lambda(const Dataset& data, double lambda);

/// Full per-group orderings (no cap), for point sets that are already small.
CoresetBundle full_bundle(const Dataset& data, double eps);

// ---- profile dynamic program ----

inline constexpr std::size_t kDefaultClusterCap = 24;
inline constexpr double kDefaultBudgetCells = 1e8;

/// Thrown when a cluster is too large for subset enumeration.
class ClusterTooLarge : public Error {
 public:
  using Error::Error;
};

/// Per-group counts achievable by a gamma-separated subset of a cluster,
/// with one witness subset each. Counts never exceed `caps`.
struct ProfileSet {
  std::vector<std::vector<std::size_t>> profiles;
  std::vector<std::vector<std::size_t>> witnesses;

  bool contains(const std::vector<std::size_t>& profile) const;
};

ProfileSet cluster_profiles(const Dataset& data, std::span<const std::size_t> cluster, double gamma,
                            const std::vector<std::size_t>& caps, std::size_t cluster_cap = kDefaultClusterCap);

struct DpOptions {
  std::size_t cluster_cap = kDefaultClusterCap;
  /// Dense table limit in cells; FAIRDIV_BUDGET_CELLS overrides the default.
  double budget_cells = 0.0;
};

double budget_cells_from_env();

/// Picks one profile per cluster so the counts add up to `targets` exactly.
/// Clusters must be pairwise gamma-separated for the result to be.
std::optional<Solution> fair_dp(const Dataset& data, const ClusterFamily& clusters,
                                const std::vector<std::size_t>& targets, double gamma, const DpOptions& options = {});

// ---- randomly shifted grid ----

struct GridRun {
  std::optional<Solution> solution;
  std::vector<double> shift;
  double side = 0.0;
  std::map<std::vector<std::int64_t>, std::vector<std::size_t>> cubes;  // surviving points per cube
  std::size_t discarded = 0;
};

/// ceil((1-eps) k_i) per group.
std::vector<std::size_t> relaxed_targets(const FairnessSpec& spec, double eps);

/// One shifted grid at guess gamma over the prefixes T_i cut at eps*gamma/4.
GridRun fair_euclidean_run(const Dataset& data, const CoresetBundle& bundle, const FairnessSpec& spec, double gamma,
                           double eps, Rng& rng, const DpOptions& options = {});

std::optional<Solution> fair_euclidean(const Dataset& data, const CoresetBundle& bundle, const FairnessSpec& spec,
                                       double gamma, double eps, Rng& rng, const DpOptions& options = {});

/// `cube-index: point ids` per line.
void write_cube_dump(std::ostream& out, const Dataset& data, const GridRun& run);

struct EuclideanSearchOptions {
  double eps = 0.5;
  double delta = 0.1;
  double lambda = 0.0;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  DpOptions dp;
};

std::size_t shifts_per_guess(double delta);

/// Builds the coreset, then tries every pairwise coreset distance as a guess
/// with up to shifts_per_guess(delta) shifts each; keeps the best success.
Solution fair_euclidean_search(const Dataset& data, const FairnessSpec& spec, const EuclideanSearchOptions& options);

/// Same search over a prebuilt bundle.
Solution fair_euclidean_search(const Dataset& data, const CoresetBundle& bundle, const FairnessSpec& spec,
                               const EuclideanSearchOptions& options);

}  // namespace fairdiv
