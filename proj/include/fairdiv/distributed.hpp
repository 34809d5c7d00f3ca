#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "fairdiv/core.hpp"
#include "fairdiv/euclidean.hpp"

namespace fairdiv {

/// site -> dataset indices held there.
using Partition = std::vector<std::vector<std::size_t>>;

Partition partition_round_robin(const Dataset& data, std::size_t sites);
Partition partition_by_hash(const Dataset& data, std::size_t sites);
Partition partition_random(const Dataset& data, std::size_t sites, std::uint64_t seed);

/// Lines of `point-id,site` with zero-based sites; an optional header is skipped.
Partition read_partition(const Dataset& data, std::istream& in, const std::string& source);

/// "round-robin", "by-hash" or "file:<path>".
Partition make_partition(const Dataset& data, std::size_t sites, const std::string& how);

struct LocalCoreset {
  std::size_t site = 0;
  std::vector<GmmOrdering> groups;
  /// Net radius per group; 0 when the whole group was kept.
  std::vector<double> radii;

  std::vector<std::size_t> points() const;
};

/// Per-group GMM over one site's points, capped at the coreset bound.
LocalCoreset local_coreset(const Dataset& data, std::span<const std::size_t> partition, const FairnessSpec& spec,
                           double eps, double lambda, std::size_t site = 0);

struct ComposedCoreset {
  std::vector<std::size_t> points;
  std::vector<std::vector<std::size_t>> groups;
  /// Largest net radius over sites, per group.
  std::vector<double> group_radius;
  std::size_t bound = 0;
};

/// Union of local coresets. Throws if two sites sent the same point.
ComposedCoreset compose(const Dataset& data, const std::vector<LocalCoreset>& locals, const FairnessSpec& spec,
                        double eps, double lambda);

struct Message {
  std::size_t from_site = 0;
  std::size_t records = 0;
};

struct MessageLedger {
  std::vector<Message> messages;

  std::size_t total_records() const;
};

enum class FinalSolver { Brute, Euclidean, Lp6 };

FinalSolver parse_final_solver(const std::string& name);
std::string to_string(FinalSolver s);

struct DistributedOptions {
  double eps = 0.5;
  double delta = 0.1;
  double lambda = 0.0;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  FinalSolver solver = FinalSolver::Brute;
  DpOptions dp;
};

struct DistributedResult {
  Solution solution;
  std::vector<LocalCoreset> locals;
  ComposedCoreset coreset;
  MessageLedger ledger;
};

/// Round one: every non-empty site sends its local coreset. Round two: the
/// coordinator solves on the union.
DistributedResult two_round_solve(const Dataset& data, const Partition& partition, const FairnessSpec& spec,
                                  const DistributedOptions& options);

}  // namespace fairdiv
