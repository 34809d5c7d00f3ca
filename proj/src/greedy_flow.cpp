#include "fairdiv/greedy_flow.hpp"

#include <algorithm>
#include <limits>
#include <ostream>
#include <queue>

#include "fairdiv/guessing.hpp"
#include "fairdiv/parallel.hpp"

namespace fairdiv {

ClusterFamily build_clusters(const Dataset& data, const FairnessSpec& spec, double gamma) {
  if (!(gamma > 0.0)) throw Error("gamma must be positive");
  const std::size_t n = data.size();
  const std::size_t m = data.num_groups();
  const double threshold = gamma / static_cast<double>(m + 1);
  const std::size_t max_clusters = spec.total() * m;
  std::vector<bool> remaining(n, true);
  std::size_t left = n;
  std::vector<std::size_t> clusters_with(m, 0);
  ClusterFamily family;

  while (left > 0 && family.size() <= max_clusters) {
    std::vector<std::size_t> cluster;
    std::vector<bool> has_group(m, false);
    bool grew = true;
    while (grew) {
      grew = false;
      for (std::size_t p = 0; p < n; ++p) {
        if (!remaining[p] || has_group[data.group_of(p)]) continue;
        if (std::find(cluster.begin(), cluster.end(), p) != cluster.end()) continue;
        bool near = cluster.empty();
        for (std::size_t x : cluster) {
          if (data.dist(p, x) < threshold) {
            near = true;
            break;
          }
        }
        if (near) {
          cluster.push_back(p);
          has_group[data.group_of(p)] = true;
          grew = true;
          break;
        }
      }
    }
    for (std::size_t q = 0; q < n; ++q) {
      if (!remaining[q]) continue;
      for (std::size_t p : cluster) {
        if (data.dist(p, q) < threshold) {
          remaining[q] = false;
          --left;
          break;
        }
      }
    }
    for (std::size_t g = 0; g < m; ++g) {
      if (has_group[g]) ++clusters_with[g];
    }
    family.clusters.push_back(std::move(cluster));
    for (std::size_t g = 0; g < m; ++g) {
      if (clusters_with[g] < spec.total()) continue;
      for (std::size_t q : data.group_members(g)) {
        if (remaining[q]) {
          remaining[q] = false;
          --left;
        }
      }
    }
  }
  return family;
}

void write_cluster_trace(std::ostream& out, const Dataset& data, const ClusterFamily& clusters) {
  for (const auto& c : clusters.clusters) {
    for (std::size_t t = 0; t < c.size(); ++t) out << (t ? " " : "") << data.point(c[t]).id;
    out << '\n';
  }
}

FlowNetwork::FlowNetwork(const Dataset& data, const FairnessSpec& spec, const ClusterFamily& clusters)
    : adj_(data.num_groups() + clusters.size() + 2), groups_(data.num_groups()), clusters_(clusters.size()) {
  for (std::size_t g = 0; g < groups_; ++g) add_arc(source(), group_node(g), static_cast<long>(spec.quotas[g]));
  for (std::size_t g = 0; g < groups_; ++g) {
    for (std::size_t j = 0; j < clusters_; ++j) {
      const auto& c = clusters.clusters[j];
      if (std::any_of(c.begin(), c.end(), [&](std::size_t p) { return data.group_of(p) == g; })) {
        add_arc(group_node(g), cluster_node(j), 1);
      }
    }
  }
  for (std::size_t j = 0; j < clusters_; ++j) add_arc(cluster_node(j), sink(), 1);
}

void FlowNetwork::add_arc(std::size_t from, std::size_t to, long cap) {
  adj_[from].push_back({to, adj_[to].size(), cap});
  adj_[to].push_back({from, adj_[from].size() - 1, 0});
}

long FlowNetwork::capacity(std::size_t from, std::size_t to) const {
  for (const Arc& a : adj_[from]) {
    if (a.to == to && a.cap > 0) return a.cap;
  }
  return 0;
}

long FlowNetwork::flow(std::size_t from, std::size_t to) const {
  for (const Arc& a : adj_[from]) {
    if (a.to == to && a.cap > 0) return a.flow;
  }
  return 0;
}

long max_flow(FlowNetwork& net) {
  const std::size_t nodes = net.sink() + 1;
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  long total = 0;
  while (true) {
    std::vector<std::size_t> via_node(nodes, kNone), via_arc(nodes, kNone);
    via_node[net.source()] = net.source();
    std::queue<std::size_t> q;
    q.push(net.source());
    while (!q.empty() && via_node[net.sink()] == kNone) {
      const std::size_t u = q.front();
      q.pop();
      const auto& arcs = net.arcs(u);
      for (std::size_t i = 0; i < arcs.size(); ++i) {
        const auto& a = arcs[i];
        if (via_node[a.to] == kNone && a.cap - a.flow > 0) {
          via_node[a.to] = u;
          via_arc[a.to] = i;
          q.push(a.to);
        }
      }
    }
    if (via_node[net.sink()] == kNone) break;
    long push = std::numeric_limits<long>::max();
    for (std::size_t v = net.sink(); v != net.source(); v = via_node[v]) {
      const auto& a = net.arcs(via_node[v])[via_arc[v]];
      push = std::min(push, a.cap - a.flow);
    }
    for (std::size_t v = net.sink(); v != net.source(); v = via_node[v]) {
      auto& a = net.arcs(via_node[v])[via_arc[v]];
      a.flow += push;
      net.arcs(v)[a.rev].flow -= push;
    }
    total += push;
  }
  return total;
}

GreedyFlowResult fair_greedy_flow_detailed(const Dataset& data, const FairnessSpec& spec, double gamma) {
  require_valid(data, spec);
  GreedyFlowResult r;
  r.clusters = build_clusters(data, spec, gamma);
  FlowNetwork net(data, spec, r.clusters);
  r.flow = max_flow(net);
  if (r.flow < static_cast<long>(spec.total())) return r;
  std::vector<std::size_t> picked;
  for (std::size_t g = 0; g < net.num_groups(); ++g) {
    for (const auto& a : net.arcs(net.group_node(g))) {
      if (a.cap <= 0 || a.flow != 1) continue;
      const std::size_t j = a.to - net.cluster_node(0);
      for (std::size_t p : r.clusters.clusters[j]) {
        if (data.group_of(p) == g) picked.push_back(p);
      }
    }
  }
  Solution s = make_solution(data, std::move(picked), "greedy-flow");
  s.gamma_used = gamma;
  r.solution = std::move(s);
  return r;
}

std::optional<Solution> fair_greedy_flow(const Dataset& data, const FairnessSpec& spec, double gamma) {
  return fair_greedy_flow_detailed(data, spec, gamma).solution;
}

Solution fair_greedy_flow_search(const Dataset& data, const FairnessSpec& spec, const GreedyFlowOptions& options) {
  require_valid(data, spec);
  if (!(options.eps > 0.0)) throw Error("eps must be positive");
  const auto range = distance_range(data);
  // With every point coincident any positive guess behaves the same.
  const GuessSchedule schedule =
      range ? geometric_guesses(range->first, range->second, options.eps) : GuessSchedule{{1.0}, ScheduleKind::Geometric};
  std::optional<Solution> best;
  std::size_t evaluated = 0;
  if (options.binary_search) {
    std::optional<Solution> at_top;
    const auto g = largest_feasible(schedule, [&](double gamma) {
      ++evaluated;
      auto s = fair_greedy_flow(data, spec, gamma);
      if (s && (!at_top || gamma > *at_top->gamma_used)) at_top = std::move(s);
      return at_top && *at_top->gamma_used == gamma;
    });
    if (g) best = std::move(at_top);
  } else {
    auto results = parallel_map(schedule.size(), options.jobs,
                                [&](std::size_t i) { return fair_greedy_flow(data, spec, schedule.values[i]); });
    evaluated = results.size();
    for (auto& r : results) {
      if (r && (!best || better_solution(*r, *best))) best = std::move(r);
    }
  }
  if (!best) throw Error("greedy flow failed at every guess");
  best->trials = evaluated;
  return *best;
}

}  // namespace fairdiv
