#include "fairdiv/streaming.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "fairdiv/guessing.hpp"
#include "fairdiv/lp_rounding.hpp"
#include "fairdiv/parallel.hpp"

namespace fairdiv {

namespace {

bool far_from(const Dataset& data, std::size_t p, const std::vector<std::size_t>& set, double tau) {
  for (std::size_t q : set) {
    if (data.dist(p, q) < tau) return false;
  }
  return true;
}

void check_bounds(const StreamBounds& b) {
  if (!(b.d_min_lb > 0.0) || !(b.d_max_ub >= b.d_min_lb) || !std::isfinite(b.d_max_ub)) {
    throw Error("distance bounds must satisfy 0 < dmin-lb <= dmax-ub");
  }
}

std::vector<std::size_t> pool_of(const std::vector<std::vector<std::vector<std::size_t>>>& per_guess) {
  std::vector<std::size_t> pool;
  for (const auto& sets : per_guess)
    for (const auto& s : sets) pool.insert(pool.end(), s.begin(), s.end());
  std::sort(pool.begin(), pool.end());
  pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
  return pool;
}

// One pass feeding every grid guess its own grouped tau-GMM.
std::vector<std::vector<std::vector<std::size_t>>> run_grouped(PointStream& stream, StreamContext& ctx,
                                                              double tau_scale, const std::vector<std::size_t>& caps) {
  std::vector<GroupedTauGmm> states;
  for (double g : ctx.guesses) states.emplace_back(stream.data(), tau_scale * g, caps);
  while (auto p = stream.next()) {
    ++ctx.points_seen;
    for (std::size_t i = 0; i < states.size(); ++i) {
      if (states[i].offer(*p)) {
        ctx.memory.retain();
        ++ctx.retained_per_guess[i];
      }
    }
  }
  std::vector<std::vector<std::vector<std::size_t>>> out;
  for (const auto& s : states) out.push_back(s.sets());
  return out;
}

StreamStats stats_of(const StreamContext& ctx, std::size_t pooled) {
  return {ctx.guesses.size(), ctx.points_seen, ctx.memory.peak(), ctx.max_guess_points(), pooled};
}

}  // namespace

PointStream::PointStream(const Dataset& data) : data_(&data), order_(data.size()) {
  std::iota(order_.begin(), order_.end(), std::size_t{0});
}

PointStream::PointStream(const Dataset& data, std::vector<std::size_t> order) : data_(&data), order_(std::move(order)) {
  std::vector<bool> seen(data.size(), false);
  for (std::size_t p : order_) {
    if (p >= data.size() || seen[p]) throw Error("stream order must list each point at most once");
    seen[p] = true;
  }
}

PointStream PointStream::shuffled(const Dataset& data, std::uint64_t seed) {
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(seed, "stream-order"));
  rng.shuffle(order.begin(), order.end());
  return PointStream(data, std::move(order));
}

std::optional<std::size_t> PointStream::next() {
  if (pos_ < order_.size()) return order_[pos_++];
  if (ended_) throw Error("stream already consumed; a single pass is allowed");
  ended_ = true;
  return std::nullopt;
}

StreamBounds exact_bounds(const Dataset& data) {
  const auto r = distance_range(data);
  if (!r) return {1.0, 1.0};
  return {r->first, r->second};
}

StreamContext::StreamContext(StreamBounds b, double e) : bounds(b), eps(e) {
  check_bounds(bounds);
  if (!(eps > 0.0)) throw Error("eps must be positive");
  guesses = geometric_guesses(bounds.d_min_lb, bounds.d_max_ub, eps).values;
  retained_per_guess.assign(guesses.size(), 0);
}

std::size_t StreamContext::max_guess_points() const {
  return retained_per_guess.empty() ? 0 : *std::max_element(retained_per_guess.begin(), retained_per_guess.end());
}

std::vector<std::size_t> tau_gmm(const Dataset& data, std::span<const std::size_t> sequence, double tau,
                                 std::size_t cap, std::span<const std::size_t> init) {
  if (!(tau > 0.0)) throw Error("tau must be positive");
  if (cap < init.size()) throw Error("cap is smaller than the initial set");
  std::vector<std::size_t> s(init.begin(), init.end());
  for (std::size_t p : sequence) {
    if (s.size() >= cap) break;
    if (far_from(data, p, s, tau)) s.push_back(p);
  }
  return s;
}

GroupedTauGmm::GroupedTauGmm(const Dataset& data, double tau, std::vector<std::size_t> caps)
    : data_(&data), tau_(tau), caps_(std::move(caps)), sets_(data.num_groups()) {
  if (!(tau > 0.0)) throw Error("tau must be positive");
  if (caps_.size() != data.num_groups()) throw Error("one cap per group is required");
}

bool GroupedTauGmm::offer(std::size_t p) {
  const std::size_t g = data_->group_of(p);
  auto& s = sets_[g];
  if (s.size() >= caps_[g] || !far_from(*data_, p, s, tau_)) return false;
  s.push_back(p);
  return true;
}

std::size_t GroupedTauGmm::size() const {
  std::size_t n = 0;
  for (const auto& s : sets_) n += s.size();
  return n;
}

std::vector<std::vector<std::size_t>> tau_gmm_stream(PointStream& stream, double tau,
                                                     const std::vector<std::size_t>& caps) {
  GroupedTauGmm state(stream.data(), tau, caps);
  while (auto p = stream.next()) state.offer(*p);
  return state.sets();
}

StreamResult fair_stream_gen(PointStream& stream, const FairnessSpec& spec, const StreamOptions& options) {
  const Dataset& data = stream.data();
  require_valid(data, spec);
  StreamContext ctx(options.bounds, options.eps);
  const auto per_guess = run_grouped(stream, ctx, 0.4, std::vector<std::size_t>(data.num_groups(), spec.total()));
  const auto pool = pool_of(per_guess);
  const Subset sub = restrict_to(data, pool);
  LpPipelineOptions lp;
  lp.mode = RoundingMode::Concentrated6;
  lp.eps = options.eps;
  lp.delta = options.delta;
  lp.seed = options.seed;
  Solution s = lift_solution(data, sub, lp_pipeline(sub.data, spec, lp));
  s.algorithm = "stream-gen";
  return {std::move(s), stats_of(ctx, pool.size())};
}

std::size_t stream_euclidean_cap(std::size_t k, double eps, double lambda) {
  const double v = static_cast<double>(k) * std::pow(8.0 / eps, lambda);
  if (v >= 1e18) return std::numeric_limits<std::size_t>::max();
  return ceil_count(v);
}

StreamResult fair_stream_euclidean(PointStream& stream, const FairnessSpec& spec, const StreamOptions& options) {
  const Dataset& data = stream.data();
  require_valid(data, spec);
  if (!data.is_euclidean()) throw Error("grid partitioning needs coordinates; use a general-metric algorithm");
  if (!(options.eps > 0.0 && options.eps <= 1.0)) throw Error("eps must lie in (0, 1]");
  const double lambda = resolve_lambda(data, options.lambda);
  StreamContext ctx(options.bounds, options.eps);
  const std::size_t cap = stream_euclidean_cap(spec.total(), options.eps, lambda);
  const auto per_guess =
      run_grouped(stream, ctx, options.eps / 4.0, std::vector<std::size_t>(data.num_groups(), cap));
  const auto pool = pool_of(per_guess);
  const Subset sub = restrict_to(data, pool);
  EuclideanSearchOptions eo;
  eo.eps = options.eps;
  eo.delta = options.delta;
  eo.lambda = lambda;
  eo.seed = options.seed;
  eo.jobs = options.jobs;
  eo.dp = options.dp;
  const CoresetBundle bundle = full_bundle(sub.data, options.eps);
  Solution s = lift_solution(data, sub, fair_euclidean_search(sub.data, bundle, spec, eo));
  s.algorithm = "stream-euclidean";
  return {std::move(s), stats_of(ctx, pool.size())};
}

std::size_t offer_two_groups(const Dataset& data, const FairnessSpec& spec, TwoGroupState& st, std::size_t p) {
  const double tau = st.gamma / 2.0;
  std::size_t taken = 0;
  auto offer = [&](std::vector<std::size_t>& set, std::size_t cap) {
    if (set.size() < cap && far_from(data, p, set, tau)) {
      set.push_back(p);
      ++taken;
    }
  };
  const std::size_t g = data.group_of(p);
  offer(st.s, spec.total());
  offer(g == 0 ? st.s1 : st.s2, spec.quotas[g]);
  return taken;
}

void finish_two_groups(const Dataset& data, const FairnessSpec& spec, TwoGroupState& st) {
  const std::size_t k[2] = {spec.quotas[0], spec.quotas[1]};
  std::vector<std::size_t> t[2];
  for (std::size_t p : st.s) t[data.group_of(p)].push_back(p);
  const long d0 = static_cast<long>(t[0].size()) - static_cast<long>(k[0]);
  const long d1 = static_cast<long>(t[1].size()) - static_cast<long>(k[1]);
  const std::size_t u = d1 < d0 ? 1 : 0;
  const std::size_t o = 1 - u;
  const auto& s_u = u == 0 ? st.s1 : st.s2;

  std::vector<std::size_t> e_u = t[u];
  if (t[u].size() < k[u]) e_u = tau_gmm(data, s_u, st.gamma / 4.0, k[u], t[u]);
  if (e_u.size() != k[u]) return;
  st.swapped = e_u.size() > t[u].size();

  std::vector<std::size_t> removed;
  for (std::size_t i = t[u].size(); i < e_u.size(); ++i) {
    std::size_t nearest = std::numeric_limits<std::size_t>::max();
    for (std::size_t q : t[o]) {
      if (nearest == std::numeric_limits<std::size_t>::max() || data.dist(e_u[i], q) < data.dist(e_u[i], nearest) ||
          (data.dist(e_u[i], q) == data.dist(e_u[i], nearest) && q < nearest)) {
        nearest = q;
      }
    }
    if (nearest != std::numeric_limits<std::size_t>::max()) removed.push_back(nearest);
  }
  std::vector<std::size_t> keep;
  for (std::size_t q : t[o]) {
    if (keep.size() == k[o]) break;
    if (std::find(removed.begin(), removed.end(), q) == removed.end()) keep.push_back(q);
  }
  if (keep.size() != k[o]) return;
  keep.insert(keep.end(), e_u.begin(), e_u.end());
  Solution s = make_solution(data, std::move(keep), "stream-two-groups");
  s.gamma_used = st.gamma;
  st.candidate = std::move(s);
}

StreamResult fair_stream_two_groups(PointStream& stream, const FairnessSpec& spec, const StreamOptions& options) {
  const Dataset& data = stream.data();
  require_valid(data, spec);
  if (data.num_groups() != 2) throw Error("the two-group stream algorithm needs exactly 2 groups");
  StreamContext ctx(options.bounds, options.eps);
  std::vector<TwoGroupState> states(ctx.guesses.size());
  for (std::size_t i = 0; i < states.size(); ++i) states[i].gamma = ctx.guesses[i];
  while (auto p = stream.next()) {
    ++ctx.points_seen;
    for (std::size_t i = 0; i < states.size(); ++i) {
      const std::size_t taken = offer_two_groups(data, spec, states[i], *p);
      ctx.memory.retain(taken);
      ctx.retained_per_guess[i] += taken;
    }
  }
  parallel_map(states.size(), options.jobs, [&](std::size_t i) {
    finish_two_groups(data, spec, states[i]);
    return 0;
  });
  std::optional<Solution> best;
  for (auto& st : states) {
    if (st.candidate && (!best || better_solution(*st.candidate, *best))) best = st.candidate;
  }
  if (!best) throw Error("no guess produced a candidate with exact quotas");
  best->trials = states.size();
  return {std::move(*best), stats_of(ctx, 0)};
}

}  // namespace fairdiv
