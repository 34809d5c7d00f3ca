#include "fairdiv/distributed.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <unordered_map>

#include "fairdiv/io.hpp"
#include "fairdiv/lp_rounding.hpp"
#include "fairdiv/oracle.hpp"
#include "fairdiv/parallel.hpp"
#include "fairdiv/random.hpp"

namespace fairdiv {

namespace {

void require_sites(std::size_t sites) {
  if (sites == 0) throw Error("at least one site is required");
}

}  // namespace

Partition partition_round_robin(const Dataset& data, std::size_t sites) {
  require_sites(sites);
  Partition p(sites);
  for (std::size_t i = 0; i < data.size(); ++i) p[i % sites].push_back(i);
  return p;
}

Partition partition_by_hash(const Dataset& data, std::size_t sites) {
  require_sites(sites);
  Partition p(sites);
  for (std::size_t i = 0; i < data.size(); ++i) p[derive_seed(0, data.point(i).id) % sites].push_back(i);
  return p;
}

Partition partition_random(const Dataset& data, std::size_t sites, std::uint64_t seed) {
  require_sites(sites);
  Rng rng(derive_seed(seed, "partition"));
  Partition p(sites);
  for (std::size_t i = 0; i < data.size(); ++i) p[rng.below(sites)].push_back(i);
  return p;
}

Partition read_partition(const Dataset& data, std::istream& in, const std::string& source) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < data.size(); ++i) index.emplace(data.point(i).id, i);
  std::vector<long> site_of(data.size(), -1);
  std::string line;
  std::size_t lineno = 0;
  std::size_t sites = 0;
  auto fail = [&](const std::string& msg) { throw Error(source + ":" + std::to_string(lineno) + ": " + msg); };
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_fields(line);
    if (f.size() != 2) fail("expected point-id,site");
    std::size_t site = 0;
    const auto [ptr, ec] = std::from_chars(f[1].data(), f[1].data() + f[1].size(), site);
    if (ec != std::errc() || ptr != f[1].data() + f[1].size()) {
      if (lineno == 1) continue;  // header
      fail("site must be a non-negative integer, got '" + f[1] + "'");
    }
    const auto it = index.find(f[0]);
    if (it == index.end()) fail("unknown point id '" + f[0] + "'");
    if (site_of[it->second] >= 0) fail("point '" + f[0] + "' assigned twice");
    site_of[it->second] = static_cast<long>(site);
    sites = std::max(sites, site + 1);
  }
  Partition p(sites);
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (site_of[i] < 0) throw Error(source + ": point '" + data.point(i).id + "' has no site");
    p[static_cast<std::size_t>(site_of[i])].push_back(i);
  }
  return p;
}

Partition make_partition(const Dataset& data, std::size_t sites, const std::string& how) {
  if (how == "round-robin") return partition_round_robin(data, sites);
  if (how == "by-hash") return partition_by_hash(data, sites);
  if (how.rfind("file:", 0) == 0) {
    const std::string path = how.substr(5);
    std::ifstream in(path);
    if (!in) throw Error("cannot open partition file " + path);
    return read_partition(data, in, path);
  }
  throw Error("unknown partition scheme '" + how + "' (round-robin, by-hash, file:<path>)");
}

std::vector<std::size_t> LocalCoreset::points() const {
  std::vector<std::size_t> all;
  for (const auto& g : groups) all.insert(all.end(), g.order.begin(), g.order.end());
  std::sort(all.begin(), all.end());
  return all;
}

LocalCoreset local_coreset(const Dataset& data, std::span<const std::size_t> partition, const FairnessSpec& spec,
                           double eps, double lambda, std::size_t site) {
  if (partition.empty()) throw Error("site " + std::to_string(site) + " holds no points");
  const std::size_t bound = coreset_bound(spec.total(), eps, resolve_lambda(data, lambda));
  LocalCoreset out;
  out.site = site;
  std::vector<std::vector<std::size_t>> by_group(data.num_groups());
  for (std::size_t p : partition) by_group[data.group_of(p)].push_back(p);
  for (const auto& members : by_group) {
    if (members.empty()) {
      out.groups.emplace_back();
      out.radii.push_back(0.0);
      continue;
    }
    out.groups.push_back(gmm(data, members, std::min(bound, members.size())));
    out.radii.push_back(members.size() > bound ? out.groups.back().radii.back() : 0.0);
  }
  return out;
}

ComposedCoreset compose(const Dataset& data, const std::vector<LocalCoreset>& locals, const FairnessSpec& spec,
                        double eps, double lambda) {
  ComposedCoreset c;
  c.groups.resize(data.num_groups());
  c.group_radius.assign(data.num_groups(), 0.0);
  std::unordered_map<std::string, std::size_t> sender;
  for (const auto& l : locals) {
    for (std::size_t p : l.points()) {
      const auto [it, fresh] = sender.emplace(data.point(p).id, l.site);
      if (!fresh) {
        throw Error("point '" + data.point(p).id + "' sent by sites " + std::to_string(it->second) + " and " +
                    std::to_string(l.site) + "; partitions must be disjoint");
      }
      c.points.push_back(p);
      c.groups[data.group_of(p)].push_back(p);
    }
    for (std::size_t g = 0; g < l.radii.size(); ++g) c.group_radius[g] = std::max(c.group_radius[g], l.radii[g]);
  }
  std::sort(c.points.begin(), c.points.end());
  for (auto& g : c.groups) std::sort(g.begin(), g.end());
  const std::size_t per = ceil_count(static_cast<double>(spec.total()) *
                                     std::pow(8.0 / eps, resolve_lambda(data, lambda)));
  c.bound = locals.size() * data.num_groups() * per;
  return c;
}

std::size_t MessageLedger::total_records() const {
  std::size_t n = 0;
  for (const auto& m : messages) n += m.records;
  return n;
}

FinalSolver parse_final_solver(const std::string& name) {
  if (name == "brute") return FinalSolver::Brute;
  if (name == "euclidean") return FinalSolver::Euclidean;
  if (name == "lp6") return FinalSolver::Lp6;
  throw Error("unknown final solver '" + name + "' (brute, euclidean, lp6)");
}

std::string to_string(FinalSolver s) {
  switch (s) {
    case FinalSolver::Brute: return "brute";
    case FinalSolver::Euclidean: return "euclidean";
    case FinalSolver::Lp6: return "lp6";
  }
  return "?";
}

DistributedResult two_round_solve(const Dataset& data, const Partition& partition, const FairnessSpec& spec,
                                  const DistributedOptions& options) {
  require_valid(data, spec);
  if (!(options.eps > 0.0 && options.eps <= 1.0)) throw Error("eps must lie in (0, 1]");
  std::vector<std::size_t> live;
  for (std::size_t s = 0; s < partition.size(); ++s)
    if (!partition[s].empty()) live.push_back(s);
  if (live.empty()) throw Error("every site is empty");

  DistributedResult r;
  r.locals = parallel_map(live.size(), options.jobs, [&](std::size_t i) {
    return local_coreset(data, partition[live[i]], spec, options.eps, options.lambda, live[i]);
  });
  for (const auto& l : r.locals) r.ledger.messages.push_back({l.site, l.points().size()});
  r.coreset = compose(data, r.locals, spec, options.eps, options.lambda);

  const Subset sub = restrict_to(data, r.coreset.points);
  Solution local;
  switch (options.solver) {
    case FinalSolver::Brute:
      local = brute_force_opt(sub.data, spec);
      break;
    case FinalSolver::Euclidean: {
      EuclideanSearchOptions eo;
      eo.eps = options.eps;
      eo.delta = options.delta;
      eo.lambda = options.lambda;
      eo.seed = options.seed;
      eo.jobs = options.jobs;
      eo.dp = options.dp;
      local = fair_euclidean_search(sub.data, full_bundle(sub.data, options.eps), spec, eo);
      break;
    }
    case FinalSolver::Lp6: {
      LpPipelineOptions lp;
      lp.mode = RoundingMode::Concentrated6;
      lp.eps = options.eps;
      lp.delta = options.delta;
      lp.seed = options.seed;
      local = lp_pipeline(sub.data, spec, lp);
      break;
    }
  }
  r.solution = lift_solution(data, sub, local);
  r.solution.algorithm = "distributed-" + to_string(options.solver);
  return r;
}

}  // namespace fairdiv
