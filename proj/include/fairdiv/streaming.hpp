#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fairdiv/core.hpp"
#include "fairdiv/euclidean.hpp"

namespace fairdiv {

/// Hands out dataset indices in a fixed order, once. Reading past the end a
/// second time throws, so an algorithm cannot quietly take another pass.
class PointStream {
 public:
  explicit PointStream(const Dataset& data);
  PointStream(const Dataset& data, std::vector<std::size_t> order);
  explicit PointStream(Dataset&&) = delete;
  PointStream(Dataset&&, std::vector<std::size_t>) = delete;

  /// Same points in a permutation derived from `seed`.
  static PointStream shuffled(const Dataset& data, std::uint64_t seed);

  std::optional<std::size_t> next();
  std::size_t consumed() const { return pos_; }
  std::size_t size() const { return order_.size(); }
  const Dataset& data() const { return *data_; }

 private:
  const Dataset* data_;
  std::vector<std::size_t> order_;
  std::size_t pos_ = 0;
  bool ended_ = false;
};

struct StreamBounds {
  double d_min_lb = 0.0;
  double d_max_ub = 0.0;
};

/// Smallest positive and largest distance. Costs a full scan, so it stands
/// in for bounds the caller would normally know.
StreamBounds exact_bounds(const Dataset& data);

/// Counts points held at once across all live guesses.
class MemoryCounter {
 public:
  void retain(std::size_t n = 1) {
    current_ += n;
    peak_ = std::max(peak_, current_);
  }
  void release(std::size_t n = 1) { current_ -= std::min(n, current_); }
  std::size_t current() const { return current_; }
  std::size_t peak() const { return peak_; }

 private:
  std::size_t current_ = 0;
  std::size_t peak_ = 0;
};

struct StreamContext {
  StreamBounds bounds;
  double eps = 0.5;
  std::vector<double> guesses;
  MemoryCounter memory;
  std::vector<std::size_t> retained_per_guess;
  std::size_t points_seen = 0;

  StreamContext(StreamBounds b, double eps);

  std::size_t max_guess_points() const;
};

/// Threshold GMM over `sequence` in order: admit p iff it is >= tau from
/// every admitted point and fewer than `cap` are held. With no `init` the
/// first point scanned seeds the set.
std::vector<std::size_t> tau_gmm(const Dataset& data, std::span<const std::size_t> sequence, double tau,
                                 std::size_t cap, std::span<const std::size_t> init = {});

/// One tau-GMM per group; points only meet their own group's set.
class GroupedTauGmm {
 public:
  GroupedTauGmm(const Dataset& data, double tau, std::vector<std::size_t> caps);

  /// True when p was admitted.
  bool offer(std::size_t p);
  const std::vector<std::vector<std::size_t>>& sets() const { return sets_; }
  std::size_t size() const;

 private:
  const Dataset* data_;
  double tau_;
  std::vector<std::size_t> caps_;
  std::vector<std::vector<std::size_t>> sets_;
};

std::vector<std::vector<std::size_t>> tau_gmm_stream(PointStream& stream, double tau,
                                                     const std::vector<std::size_t>& caps);

struct StreamStats {
  std::size_t guesses = 0;
  std::size_t points_seen = 0;
  std::size_t peak_memory_points = 0;
  std::size_t max_guess_points = 0;
  std::size_t pooled_points = 0;
};

struct StreamResult {
  Solution solution;
  StreamStats stats;
};

struct StreamOptions {
  StreamBounds bounds;
  double eps = 0.5;
  double delta = 0.1;
  double lambda = 0.0;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  DpOptions dp;
};

/// Per-group tau-GMM (tau = 2 gamma / 5, k per group) for every grid guess,
/// then concentrated LP rounding on the pooled points.
StreamResult fair_stream_gen(PointStream& stream, const FairnessSpec& spec, const StreamOptions& options);

/// Per-group tau-GMM (tau = eps gamma / 4) for every grid guess, then the
/// shifted-grid search over the pooled points.
StreamResult fair_stream_euclidean(PointStream& stream, const FairnessSpec& spec, const StreamOptions& options);

std::size_t stream_euclidean_cap(std::size_t k, double eps, double lambda);

/// Two groups only. Exact quotas.
StreamResult fair_stream_two_groups(PointStream& stream, const FairnessSpec& spec, const StreamOptions& options);

/// What one guess of the two-group algorithm kept, and the candidate built from it.
struct TwoGroupState {
  double gamma = 0.0;
  std::vector<std::size_t> s, s1, s2;
  std::optional<Solution> candidate;
  bool swapped = false;
};

/// Feeds one stream point to one guess; returns how many sets took it.
std::size_t offer_two_groups(const Dataset& data, const FairnessSpec& spec, TwoGroupState& state, std::size_t p);

/// Post-stream step for one guess: swap in points of the short group and drop
/// their nearest neighbours from the long one.
void finish_two_groups(const Dataset& data, const FairnessSpec& spec, TwoGroupState& state);

}  // namespace fairdiv
