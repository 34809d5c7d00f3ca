#include "fairdiv/euclidean.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <ostream>
#include <unordered_map>

#include "fairdiv/guessing.hpp"
#include "fairdiv/parallel.hpp"

namespace fairdiv {

namespace {

// Mixed-radix encoding of count vectors bounded by `limits`.
struct Radix {
  std::vector<std::uint64_t> stride;
  std::vector<std::size_t> limits;
  std::uint64_t size = 1;

  explicit Radix(const std::vector<std::size_t>& lim) : limits(lim) {
    double total = 1.0;
    for (std::size_t l : lim) {
      stride.push_back(size);
      total *= static_cast<double>(l + 1);
      if (total > 4e18) throw Error("profile space too large: " + std::to_string(total) + " states");
      size *= l + 1;
    }
  }

  std::uint64_t encode(const std::vector<std::size_t>& v) const {
    std::uint64_t c = 0;
    for (std::size_t g = 0; g < v.size(); ++g) c += v[g] * stride[g];
    return c;
  }

  std::vector<std::size_t> decode(std::uint64_t c) const {
    std::vector<std::size_t> v(limits.size());
    for (std::size_t g = 0; g < limits.size(); ++g) {
      v[g] = static_cast<std::size_t>(c / stride[g] % (limits[g] + 1));
    }
    return v;
  }
};

double resolve_budget(const DpOptions& options) {
  return options.budget_cells > 0.0 ? options.budget_cells : budget_cells_from_env();
}

std::uint64_t bits_of(double x) { return std::bit_cast<std::uint64_t>(x); }

void require_line(const Dataset& data) {
  if (!data.is_euclidean() || data.dimension() != 1) throw Error("line algorithm needs 1-D coordinates");
}

}  // namespace

double budget_cells_from_env() {
  if (const char* env = std::getenv("FAIRDIV_BUDGET_CELLS")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end != env && v > 0.0) return v;
  }
  return kDefaultBudgetCells;
}

// ---- line ----

std::optional<Solution> fair_line(const Dataset& data, const FairnessSpec& spec, double gamma) {
  require_line(data);
  require_valid(data, spec);
  if (!(gamma >= 0.0)) throw Error("gamma must be non-negative");
  const std::size_t n = data.size();
  std::vector<std::size_t> sorted(n);
  std::iota(sorted.begin(), sorted.end(), std::size_t{0});
  std::stable_sort(sorted.begin(), sorted.end(),
                   [&](std::size_t a, std::size_t b) { return data.point(a).coords[0] < data.point(b).coords[0]; });

  const Radix radix(spec.quotas);
  const std::uint64_t cells = radix.size * (n + 1);
  if (static_cast<double>(cells) > budget_cells_from_env()) {
    throw Error("line DP needs " + std::to_string(cells) + " cells, over budget");
  }
  const std::uint64_t P = radix.size;
  std::vector<std::uint8_t> h(cells, 0);
  h[0] = 1;  // empty prefix, zero profile
  // prior[j]: length of the longest prefix whose points are all >= gamma left of point j.
  std::vector<std::size_t> prior(n + 1, 0);
  std::size_t jp = 0;
  for (std::size_t j = 1; j <= n; ++j) {
    while (jp < j - 1 && data.dist(sorted[jp], sorted[j - 1]) >= gamma) ++jp;
    prior[j] = jp;
  }
  for (std::size_t j = 1; j <= n; ++j) {
    const std::size_t g = data.group_of(sorted[j - 1]);
    const std::uint64_t step = radix.stride[g];
    const std::uint8_t* prev = &h[(j - 1) * P];
    const std::uint8_t* back = &h[prior[j] * P];
    std::uint8_t* cur = &h[j * P];
    for (std::uint64_t c = 0; c < P; ++c) {
      cur[c] = prev[c];
      if (!cur[c] && c / step % (radix.limits[g] + 1) > 0) cur[c] = back[c - step];
    }
  }
  std::uint64_t c = radix.encode(spec.quotas);
  if (!h[n * P + c]) return std::nullopt;
  std::vector<std::size_t> picked;
  for (std::size_t j = n; j > 0 && c != 0;) {
    if (h[(j - 1) * P + c]) {
      --j;
      continue;
    }
    picked.push_back(sorted[j - 1]);
    c -= radix.stride[data.group_of(sorted[j - 1])];
    j = prior[j];
  }
  Solution s = make_solution(data, std::move(picked), "line");
  s.gamma_used = gamma;
  return s;
}

Solution fair_line_opt(const Dataset& data, const FairnessSpec& spec) {
  require_line(data);
  require_valid(data, spec);
  std::optional<double> best;
  std::size_t evaluated = 0;
  if (distance_range(data)) {
    best = largest_feasible(pairwise_guesses(data), [&](double g) {
      ++evaluated;
      return fair_line(data, spec, g).has_value();
    });
  }
  // With no positive feasible guess the optimum is 0 (forced duplicates).
  auto s = fair_line(data, spec, best.value_or(0.0));
  if (!s) throw Error("quotas are infeasible");
  s->trials = evaluated + 1;
  return *s;
}

// ---- gmm and coresets ----

GmmOrdering gmm(const Dataset& data, std::span<const std::size_t> points, std::size_t target,
                std::span<const std::size_t> init) {
  if (points.empty() && init.empty()) throw Error("gmm needs at least one point");
  GmmOrdering out;
  std::vector<double> nearest(points.size(), kUnbounded);
  std::vector<bool> taken(points.size(), false);
  auto add = [&](std::size_t p, double radius) {
    out.order.push_back(p);
    out.radii.push_back(radius);
    for (std::size_t t = 0; t < points.size(); ++t) {
      if (points[t] == p) taken[t] = true;
      nearest[t] = std::min(nearest[t], data.dist(points[t], p));
    }
  };
  if (!init.empty()) {
    for (std::size_t p : init) {
      double r = kUnbounded;
      for (std::size_t q : out.order) r = std::min(r, data.dist(p, q));
      add(p, r);
    }
  } else if (target > 0) {
    add(*std::min_element(points.begin(), points.end()), kUnbounded);
  }
  while (out.order.size() < target) {
    std::size_t best = points.size();
    for (std::size_t t = 0; t < points.size(); ++t) {
      if (taken[t]) continue;
      if (best == points.size() || nearest[t] > nearest[best] ||
          (nearest[t] == nearest[best] && points[t] < points[best])) {
        best = t;
      }
    }
    if (best == points.size()) break;
    add(points[best], nearest[best]);
  }
  return out;
}

std::vector<std::size_t> maximal_prefix(const GmmOrdering& ordering, double threshold) {
  std::size_t len = ordering.order.empty() ? 0 : 1;
  while (len < ordering.size() && ordering.radii[len] >= threshold) ++len;
  return {ordering.order.begin(), ordering.order.begin() + static_cast<std::ptrdiff_t>(len)};
}

std::size_t coreset_bound(std::size_t k, double eps, double lambda) {
  if (!(eps > 0.0)) throw Error("eps must be positive");
  const double eps_prime = eps / (1.0 + eps);
  const double v = std::pow(4.0 / eps_prime, lambda) * static_cast<double>(k);
  if (v >= 1e18) return std::numeric_limits<std::size_t>::max();
  return ceil_count(v);
}

double resolve_lambda(const Dataset& data, double lambda) {
  if (lambda > 0.0) return lambda;
  if (!data.is_euclidean()) throw Error("a doubling-dimension parameter (lambda) is required for matrix input");
  return static_cast<double>(data.dimension());
}

std::vector<std::size_t> CoresetBundle::points() const {
  std::vector<std::size_t> all;
  for (const auto& g : groups) all.insert(all.end(), g.order.begin(), g.order.end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  return all;
}

CoresetBundle build_coreset(const Dataset& data, const FairnessSpec& spec, double eps, double lambda) {
  require_valid(data, spec);
  CoresetBundle b;
  b.eps = eps;
  b.lambda = resolve_lambda(data, lambda);
  b.bound = coreset_bound(spec.total(), eps, b.lambda);
  for (std::size_t g = 0; g < data.num_groups(); ++g) {
    const auto& members = data.group_members(g);
    if (members.empty()) {
      b.groups.emplace_back();
      continue;
    }
    b.groups.push_back(gmm(data, members, std::min(b.bound, members.size())));
  }
  return b;
}

CoresetBundle full_bundle(const Dataset& data, double eps) {
  CoresetBundle b;
  b.eps = eps;
  for (std::size_t g = 0; g < data.num_groups(); ++g) {
    const auto& members = data.group_members(g);
    b.groups.push_back(members.empty() ? GmmOrdering{} : gmm(data, members, members.size()));
    b.bound = std::max(b.bound, members.size());
  }
  return b;
}

// ---- profiles and dp ----

bool ProfileSet::contains(const std::vector<std::size_t>& profile) const {
  return std::find(profiles.begin(), profiles.end(), profile) != profiles.end();
}

ProfileSet cluster_profiles(const Dataset& data, std::span<const std::size_t> cluster, double gamma,
                            const std::vector<std::size_t>& caps, std::size_t cluster_cap) {
  if (cluster.size() > cluster_cap) {
    throw ClusterTooLarge("cluster of " + std::to_string(cluster.size()) + " points exceeds the enumeration cap of " +
                          std::to_string(cluster_cap));
  }
  ProfileSet out;
  std::map<std::vector<std::size_t>, std::size_t> seen;
  std::vector<std::size_t> counts(caps.size(), 0), chosen;
  auto visit = [&](auto&& self, std::size_t from) -> void {
    if (seen.emplace(counts, out.profiles.size()).second) {
      out.profiles.push_back(counts);
      out.witnesses.push_back(chosen);
    }
    for (std::size_t i = from; i < cluster.size(); ++i) {
      const std::size_t p = cluster[i];
      const std::size_t g = data.group_of(p);
      if (counts[g] >= caps[g]) continue;
      bool separated = true;
      for (std::size_t q : chosen) {
        if (data.dist(p, q) < gamma) {
          separated = false;
          break;
        }
      }
      if (!separated) continue;
      ++counts[g];
      chosen.push_back(p);
      self(self, i + 1);
      chosen.pop_back();
      --counts[g];
    }
  };
  visit(visit, 0);
  return out;
}

std::optional<Solution> fair_dp(const Dataset& data, const ClusterFamily& clusters,
                                const std::vector<std::size_t>& targets, double gamma, const DpOptions& options) {
  if (targets.size() != data.num_groups()) throw Error("target count does not match group count");
  const Radix radix(targets);
  const std::uint64_t P = radix.size;
  const std::size_t t = clusters.size();
  std::vector<ProfileSet> sets;
  std::vector<std::vector<std::uint64_t>> codes;
  for (const auto& c : clusters.clusters) {
    sets.push_back(cluster_profiles(data, c, gamma, targets, options.cluster_cap));
    std::vector<std::uint64_t> cc;
    for (const auto& p : sets.back().profiles) cc.push_back(radix.encode(p));
    codes.push_back(std::move(cc));
  }
  const double budget = resolve_budget(options);
  const std::uint64_t goal = radix.encode(targets);

  auto fits = [&](std::uint64_t c, std::size_t j, std::size_t qi) {
    const auto& q = sets[j].profiles[qi];
    for (std::size_t g = 0; g < q.size(); ++g) {
      if (c / radix.stride[g] % (targets[g] + 1) + q[g] > targets[g]) return false;
    }
    return true;
  };

  // choice[j][code]: profile of cluster j-1 used to reach `code` after j clusters.
  std::vector<std::size_t> picks;
  if (static_cast<double>(P) * static_cast<double>(t + 1) <= budget) {
    std::vector<std::int32_t> choice(P * (t + 1), -1);
    choice[0] = 0;
    for (std::size_t j = 1; j <= t; ++j) {
      const std::int32_t* prev = &choice[(j - 1) * P];
      std::int32_t* cur = &choice[j * P];
      for (std::uint64_t c = 0; c < P; ++c) {
        if (prev[c] < 0) continue;
        for (std::size_t qi = 0; qi < codes[j - 1].size(); ++qi) {
          if (!fits(c, j - 1, qi)) continue;
          const std::uint64_t next = c + codes[j - 1][qi];
          if (cur[next] < 0) cur[next] = static_cast<std::int32_t>(qi);
        }
      }
    }
    if (choice[t * P + goal] < 0) return std::nullopt;
    std::uint64_t c = goal;
    for (std::size_t j = t; j > 0; --j) {
      const auto qi = static_cast<std::size_t>(choice[j * P + c]);
      picks.insert(picks.end(), sets[j - 1].witnesses[qi].begin(), sets[j - 1].witnesses[qi].end());
      c -= codes[j - 1][qi];
    }
  } else {
    std::vector<std::unordered_map<std::uint64_t, std::int32_t>> layers(t + 1);
    layers[0][0] = 0;
    double cells = 1.0;
    for (std::size_t j = 1; j <= t; ++j) {
      std::vector<std::uint64_t> keys;
      for (const auto& [k, v] : layers[j - 1]) keys.push_back(k);
      std::sort(keys.begin(), keys.end());
      for (std::uint64_t c : keys) {
        for (std::size_t qi = 0; qi < codes[j - 1].size(); ++qi) {
          if (!fits(c, j - 1, qi)) continue;
          layers[j].emplace(c + codes[j - 1][qi], static_cast<std::int32_t>(qi));
        }
      }
      cells += static_cast<double>(layers[j].size());
      if (cells > budget) throw Error("DP state budget exceeded (" + std::to_string(cells) + " states)");
    }
    if (!layers[t].count(goal)) return std::nullopt;
    std::uint64_t c = goal;
    for (std::size_t j = t; j > 0; --j) {
      const auto qi = static_cast<std::size_t>(layers[j].at(c));
      picks.insert(picks.end(), sets[j - 1].witnesses[qi].begin(), sets[j - 1].witnesses[qi].end());
      c -= codes[j - 1][qi];
    }
  }
  Solution s = make_solution(data, std::move(picks), "fair-dp");
  s.gamma_used = gamma;
  return s;
}

// ---- grid ----

std::vector<std::size_t> relaxed_targets(const FairnessSpec& spec, double eps) {
  std::vector<std::size_t> t;
  for (std::size_t k : spec.quotas) t.push_back(ceil_count((1.0 - eps) * static_cast<double>(k)));
  return t;
}

GridRun fair_euclidean_run(const Dataset& data, const CoresetBundle& bundle, const FairnessSpec& spec, double gamma,
                           double eps, Rng& rng, const DpOptions& options) {
  if (!data.is_euclidean()) throw Error("grid partitioning needs coordinates; use a general-metric algorithm");
  if (!(eps > 0.0 && eps <= 1.0)) throw Error("eps must lie in (0, 1]");
  if (!(gamma > 0.0)) throw Error("gamma must be positive");
  const std::size_t dim = data.dimension();
  GridRun run;
  run.side = 2.0 * static_cast<double>(spec.groups()) * static_cast<double>(dim) * gamma / eps;
  const double w = run.side;
  std::vector<std::size_t> pool;
  for (const auto& ordering : bundle.groups) {
    const auto prefix = maximal_prefix(ordering, eps * gamma / 4.0);
    pool.insert(pool.end(), prefix.begin(), prefix.end());
  }
  std::sort(pool.begin(), pool.end());
  run.shift.resize(dim);
  for (double& s : run.shift) s = rng.uniform() * w;
  for (std::size_t q : pool) {
    std::vector<std::int64_t> cube(dim);
    bool keep = true;
    for (std::size_t d = 0; d < dim && keep; ++d) {
      const double v = data.point(q).coords[d] - run.shift[d];
      double c = std::floor(v / w);
      double off = v - c * w;
      if (off < 0.0) {
        c -= 1.0;
        off += w;
      } else if (off >= w) {
        c += 1.0;
        off -= w;
      }
      cube[d] = static_cast<std::int64_t>(c);
      if (off < gamma / 2.0 || off > w - gamma / 2.0) keep = false;
    }
    if (keep) {
      run.cubes[cube].push_back(q);
    } else {
      ++run.discarded;
    }
  }
  ClusterFamily family;
  for (const auto& [key, members] : run.cubes) family.clusters.push_back(members);
  auto s = fair_dp(data, family, relaxed_targets(spec, eps), gamma, options);
  if (s && s->diversity >= gamma) {
    s->algorithm = "euclidean";
    run.solution = std::move(s);
  }
  return run;
}

std::optional<Solution> fair_euclidean(const Dataset& data, const CoresetBundle& bundle, const FairnessSpec& spec,
                                       double gamma, double eps, Rng& rng, const DpOptions& options) {
  return fair_euclidean_run(data, bundle, spec, gamma, eps, rng, options).solution;
}

void write_cube_dump(std::ostream& out, const Dataset& data, const GridRun& run) {
  for (const auto& [key, members] : run.cubes) {
    for (std::size_t d = 0; d < key.size(); ++d) out << (d ? "," : "") << key[d];
    out << ':';
    for (std::size_t p : members) out << ' ' << data.point(p).id;
    out << '\n';
  }
}

std::size_t shifts_per_guess(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) return 1;
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(std::log2(1.0 / delta))));
}

Solution fair_euclidean_search(const Dataset& data, const CoresetBundle& bundle, const FairnessSpec& spec,
                               const EuclideanSearchOptions& options) {
  require_valid(data, spec);
  if (!data.is_euclidean()) throw Error("grid partitioning needs coordinates; use a general-metric algorithm");
  const auto pool = bundle.points();
  std::vector<double> guesses = {1.0};  // any guess works when nothing is distinct
  try {
    guesses = pairwise_guesses(data, pool).values;
  } catch (const Error&) {
  }
  const std::size_t shifts = shifts_per_guess(options.delta);
  struct Outcome {
    std::optional<Solution> solution;
    std::size_t shifts_run = 0;
    bool skipped = false;
  };
  auto results = parallel_map(guesses.size(), options.jobs, [&](std::size_t i) {
    Outcome o;
    const double gamma = guesses[i];
    for (std::size_t s = 0; s < shifts; ++s) {
      Rng rng(derive_seed(options.seed, "grid-shift", bits_of(gamma), s));
      ++o.shifts_run;
      try {
        o.solution = fair_euclidean(data, bundle, spec, gamma, options.eps, rng, options.dp);
      } catch (const ClusterTooLarge&) {
        o.skipped = true;
        break;
      }
      if (o.solution) break;
    }
    return o;
  });
  std::optional<Solution> best;
  std::size_t total_shifts = 0, skipped = 0;
  for (auto& r : results) {
    total_shifts += r.shifts_run;
    skipped += r.skipped;
    if (r.solution && (!best || better_solution(*r.solution, *best))) best = std::move(r.solution);
  }
  if (!best) {
    throw Error("no guess succeeded (" + std::to_string(guesses.size()) + " guesses, " +
                std::to_string(total_shifts) + " shifts, " + std::to_string(skipped) +
                " skipped for oversized cubes)");
  }
  best->trials = total_shifts;
  if (skipped > 0) {
    best->diagnostics.push_back(std::to_string(skipped) + " guesses skipped: a cube exceeded the enumeration cap");
  }
  return *best;
}

Solution fair_euclidean_search(const Dataset& data, const FairnessSpec& spec, const EuclideanSearchOptions& options) {
  const CoresetBundle bundle = build_coreset(data, spec, options.eps, options.lambda);
  return fair_euclidean_search(data, bundle, spec, options);
}

}  // namespace fairdiv
