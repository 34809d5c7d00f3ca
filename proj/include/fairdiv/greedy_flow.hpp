#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "fairdiv/core.hpp"

namespace fairdiv {

/// Greedy clusters for a guess gamma. Each cluster holds at most one point
/// per group; members are linked by distances below gamma/(m+1).
///
/// Candidates are scanned in ascending index order and the scan restarts
/// after every insertion.
ClusterFamily build_clusters(const Dataset& data, const FairnessSpec& spec, double gamma);

/// One line per cluster with the member ids, space separated.
void write_cluster_trace(std::ostream& out, const Dataset& data, const ClusterFamily& clusters);

/// Source a, group nodes u_1..u_m, cluster nodes v_1..v_t, sink b.
class FlowNetwork {
 public:
  struct Arc {
    std::size_t to;
    std::size_t rev;  // index of the reverse arc in adj[to]
    long cap;
    long flow = 0;
  };

  FlowNetwork(const Dataset& data, const FairnessSpec& spec, const ClusterFamily& clusters);

  std::size_t source() const { return 0; }
  std::size_t sink() const { return adj_.size() - 1; }
  std::size_t group_node(std::size_t g) const { return 1 + g; }
  std::size_t cluster_node(std::size_t j) const { return 1 + groups_ + j; }
  std::size_t num_groups() const { return groups_; }
  std::size_t num_clusters() const { return clusters_; }

  const std::vector<Arc>& arcs(std::size_t node) const { return adj_[node]; }
  std::vector<Arc>& arcs(std::size_t node) { return adj_[node]; }

  /// Capacity of the forward arc from -> to, or 0 if absent.
  long capacity(std::size_t from, std::size_t to) const;
  long flow(std::size_t from, std::size_t to) const;

 private:
  void add_arc(std::size_t from, std::size_t to, long cap);

  std::vector<std::vector<Arc>> adj_;
  std::size_t groups_ = 0, clusters_ = 0;
};

/// Edmonds-Karp: augments along shortest paths, found breadth-first with
/// arcs visited in insertion order. Returns the flow value.
long max_flow(FlowNetwork& net);

struct GreedyFlowResult {
  ClusterFamily clusters;
  long flow = 0;
  std::optional<Solution> solution;  // empty when flow < k (abort)
};

GreedyFlowResult fair_greedy_flow_detailed(const Dataset& data, const FairnessSpec& spec, double gamma);

/// Exactly k_i points per group with pairwise distances >= gamma/(m+1), or
/// none when the flow falls short of k.
std::optional<Solution> fair_greedy_flow(const Dataset& data, const FairnessSpec& spec, double gamma);

struct GreedyFlowOptions {
  double eps = 0.1;
  /// Binary search for the largest succeeding guess instead of scanning all.
  bool binary_search = false;
  std::size_t jobs = 1;
};

/// Runs the geometric grid over [min positive distance, max distance] and
/// keeps the best solution. Throws when no guess succeeds.
Solution fair_greedy_flow_search(const Dataset& data, const FairnessSpec& spec,
                                 const GreedyFlowOptions& options = {});

}  // namespace fairdiv
