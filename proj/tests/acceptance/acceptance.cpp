// One PASS/FAIL line per acceptance criterion. Exit status is the number of
// failures, capped at 1.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "../support.hpp"
#include "fairdiv/cli.hpp"
#include "fairdiv/distributed.hpp"
#include "fairdiv/euclidean.hpp"
#include "fairdiv/greedy_flow.hpp"
#include "fairdiv/guessing.hpp"
#include "fairdiv/io.hpp"
#include "fairdiv/lp_rounding.hpp"
#include "fairdiv/oracle.hpp"
#include "fairdiv/random.hpp"
#include "fairdiv/streaming.hpp"
#include "fairdiv/synthetic.hpp"

using namespace fairdiv;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string fmt(double x, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

std::vector<std::size_t> all_of(const Dataset& d) {
  std::vector<std::size_t> v(d.size());
  std::iota(v.begin(), v.end(), 0);
  return v;
}

bool counts_at_least(const Solution& s, const FairnessSpec& spec, double beta) {
  for (std::size_t g = 0; g < spec.groups(); ++g)
    if (s.group_counts[g] < ceil_count(beta * static_cast<double>(spec.quotas[g]))) return false;
  return true;
}

// Quotas drawn in [1, 3], shrunk until brute force stays cheap.
FairnessSpec oracle_sized_quotas(const Dataset& d, Rng& rng, double max_candidates = 2e6) {
  FairnessSpec spec;
  for (std::size_t g = 0; g < d.num_groups(); ++g)
    spec.quotas.push_back(std::min<std::size_t>(1 + rng.below(3), d.group_members(g).size()));
  while (candidate_count(d, spec) > max_candidates) {
    auto big = std::max_element(spec.quotas.begin(), spec.quotas.end());
    if (*big <= 1) break;
    --*big;
  }
  return spec;
}

Outcome line_exactness() {
  const auto start = Clock::now();
  int equal = 0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const auto [d, spec] = testing::random_line(seed, 4 + seed % 9, 1 + seed % 3, seed % 2 == 0);
    equal += fair_line_opt(d, spec).diversity == brute_force_opt(d, spec).diversity;
  }
  const double t = seconds_since(start);
  return {equal == 50 && t < 30.0, std::to_string(equal) + "/50 bitwise equal in " + fmt(t) + " s"};
}

Outcome greedy_flow_factor() {
  int good = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    SyntheticConfig c;
    c.n = 12 + seed % 29;
    c.m = 2 + seed % 2;
    c.dim = 0;
    c.seed = seed;
    const Dataset d = generate_synthetic(c);
    Rng rng(derive_seed(seed, "criterion-2"));
    const FairnessSpec spec = oracle_sized_quotas(d, rng);
    const double opt = brute_force_opt(d, spec).diversity;
    GreedyFlowOptions o;
    o.eps = 0.01;
    const Solution s = fair_greedy_flow_search(d, spec, o);
    good += s.group_counts == spec.quotas && s.diversity >= opt / ((static_cast<double>(c.m) + 1.0) * 1.01);
  }
  return {good == 100, std::to_string(100 - good) + " violations over 100 shortest-path metrics"};
}

Outcome tight_example() {
  const Dataset d = read_dataset(std::string(FAIRDIV_FIXTURES) + "/fix_tight.txt");
  const FairnessSpec spec = fixtures::fix_tight_spec();
  const GreedyFlowResult r = fair_greedy_flow_detailed(d, spec, 1.0);
  std::ostringstream trace;
  write_cluster_trace(trace, d, r.clusters);
  bool together = false;
  std::string line;
  std::istringstream lines(trace.str());
  while (std::getline(lines, line)) {
    std::istringstream ids(line);
    std::vector<std::string> v{std::istream_iterator<std::string>(ids), {}};
    together = together || (std::count(v.begin(), v.end(), "p1") && std::count(v.begin(), v.end(), "p2"));
  }
  const double div = r.solution ? r.solution->diversity : -1.0;
  return {div == 1.0 && together,
          "diversity " + fmt(div) + ", p1 and p2 " + (together ? "share" : "do not share") + " a cluster"};
}

Outcome expected_fairness() {
  const auto start = Clock::now();
  const Dataset a = fixtures::fix_a();
  const FairnessSpec spec = fixtures::fix_a_spec();
  const FractionalSolution f = solve_feasibility(build_lp(a, spec, 3.0));
  if (!f.feasible) return {false, "LP infeasible at gamma 3"};
  const int trials = 2000;
  std::vector<double> sum(2, 0.0), sq(2, 0.0);
  double closest = kUnbounded;
  for (int t = 0; t < trials; ++t) {
    Rng rng(derive_seed(2024, "criterion-4", static_cast<std::uint64_t>(t)));
    const Solution s = round_expected_fair(a, spec, 3.0, f.x, rng);
    closest = std::min(closest, s.diversity);
    for (std::size_t g = 0; g < 2; ++g) {
      sum[g] += static_cast<double>(s.group_counts[g]);
      sq[g] += static_cast<double>(s.group_counts[g] * s.group_counts[g]);
    }
  }
  bool ok = closest >= 1.5;
  std::string detail;
  for (std::size_t g = 0; g < 2; ++g) {
    const double mean = sum[g] / trials;
    const double sd = std::sqrt(std::max(0.0, sq[g] / trials - mean * mean));
    const double floor = static_cast<double>(spec.quotas[g]) - 3.0 * sd / std::sqrt(double(trials));
    ok = ok && mean >= floor;
    detail += "mean " + a.group_labels()[g] + " " + fmt(mean, 4) + " (floor " + fmt(floor, 4) + "), ";
  }
  const double t = seconds_since(start);
  ok = ok && t < 20.0;
  return {ok, detail + "min distance " + fmt(closest) + ", " + fmt(t) + " s"};
}

Outcome concentrated_rounding() {
  SyntheticConfig c;
  c.n = 500;
  c.m = 2;
  c.dim = 2;
  c.seed = 5;
  const Dataset d = generate_synthetic(c);
  const FairnessSpec spec{{40, 40}};
  const double grid_eps = 0.1;
  const auto range = distance_range(d);
  const auto found = lp_search(d, spec, geometric_guesses(range->first, range->second, grid_eps));
  if (!found) return {false, "LP infeasible on the whole grid"};
  // An infeasible LP one grid step up certifies l* < gamma (1 + grid_eps),
  // since the LP relaxes the quota-exact problem.
  const double above = found->gamma * (1.0 + grid_eps);
  const bool certified = !solve_feasibility(build_lp(d, spec, above)).feasible;
  int good = 0;
  for (std::uint64_t run = 0; run < 100; ++run) {
    LpPipelineOptions o;
    o.mode = RoundingMode::Concentrated6;
    o.eps = 0.5;
    o.delta = 0.1;
    o.seed = run;
    o.grid_eps = grid_eps;
    const Solution s = lp_round(d, spec, *found, o);
    good += s.diversity >= found->gamma / 6.0 && counts_at_least(s, spec, 0.5);
  }
  return {certified && good >= 90, std::to_string(good) + "/100 runs at gamma " + fmt(found->gamma) +
                                       (certified ? ", LP infeasible at gamma(1+grid-eps)" : ", bound not certified")};
}

Outcome coreset_quality() {
  int bad = 0;
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const Dataset d = testing::random_cloud(seed, 8 + seed % 7, 2, 2);
    Rng rng(derive_seed(seed, "criterion-6"));
    const FairnessSpec spec = oracle_sized_quotas(d, rng);
    const CoresetBundle b = build_coreset(d, spec, 0.5, 2.0);
    const std::size_t cap = ceil_count(std::pow(8.0 / 0.5, 2.0) * static_cast<double>(spec.total()));
    for (const auto& g : b.groups) bad += g.size() > cap;
    const double opt = brute_force_opt(d, spec).diversity;
    bad += brute_force_opt(restrict_to(d, b.points()).data, spec).diversity < opt / 1.5;
  }
  return {bad == 0, std::to_string(bad) + " violations over 30 instances"};
}

Outcome shift_success() {
  const Dataset d = testing::random_cloud(77, 14, 2, 2, 30.0);
  const FairnessSpec spec{{2, 2}};
  const CoresetBundle b = build_coreset(d, spec, 0.5);
  const double opt = brute_force_opt(d, spec).diversity;
  Rng rng(derive_seed(7, "criterion-7"));
  int ok = 0;
  for (int t = 0; t < 200; ++t) ok += fair_euclidean_run(d, b, spec, opt, 0.5, rng).solution.has_value();
  const double rate = ok / 200.0;
  const double floor = 0.5 - 3.0 * std::sqrt(0.25 / 200.0);
  return {rate >= floor, "success " + fmt(rate) + " (floor " + fmt(floor) + ")"};
}

Outcome bicriteria() {
  int good = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Dataset d = testing::random_cloud(seed, 12, 2, 2);
    Rng rng(derive_seed(seed, "criterion-8"));
    const FairnessSpec spec = oracle_sized_quotas(d, rng);
    const double opt = brute_force_opt(d, spec).diversity;
    EuclideanSearchOptions o;
    o.eps = 0.5;
    o.delta = 0.1;
    o.seed = seed;
    const Solution s = fair_euclidean_search(d, spec, o);
    good += s.diversity >= opt / 1.5 && counts_at_least(s, spec, 0.5);
  }
  return {good >= 18, std::to_string(good) + "/20 runs meet both bounds"};
}

Outcome stream_two_groups() {
  int bad = 0;
  std::size_t worst_ratio_num = 0, worst_ratio_den = 1;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    SyntheticConfig c;
    c.n = 20 + (seed * 37) % 181;
    c.m = 2;
    c.dim = seed % 3 == 0 ? 0 : 2;
    c.seed = seed;
    const Dataset d = generate_synthetic(c);
    Rng rng(derive_seed(seed, "criterion-9"));
    const FairnessSpec spec = oracle_sized_quotas(d, rng);
    const double opt = brute_force_opt(d, spec).diversity;
    StreamOptions o;
    o.eps = 0.1;
    o.bounds = exact_bounds(d);
    PointStream s = PointStream::shuffled(d, seed);
    const StreamResult r = fair_stream_two_groups(s, spec, o);
    const std::size_t k = spec.total();
    bad += r.solution.group_counts != spec.quotas || r.solution.diversity < opt / (4.0 * 1.1) ||
           r.stats.max_guess_points > 3 * k;
    if (r.stats.max_guess_points * worst_ratio_den > worst_ratio_num * k) {
      worst_ratio_num = r.stats.max_guess_points;
      worst_ratio_den = k;
    }
  }
  return {bad == 0, std::to_string(bad) + " violations over 100 streams, largest per-guess memory " +
                        std::to_string(worst_ratio_num) + " points for k = " + std::to_string(worst_ratio_den)};
}

Outcome stream_general() {
  int good = 0, memory_bad = 0;
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    SyntheticConfig c;
    c.n = 20 + seed % 30;
    c.m = 2 + seed % 2;
    c.dim = seed % 2 ? 2 : 0;
    c.seed = seed;
    const Dataset d = generate_synthetic(c);
    Rng rng(derive_seed(seed, "criterion-10"));
    const FairnessSpec spec = oracle_sized_quotas(d, rng);
    const double opt = brute_force_opt(d, spec).diversity;
    StreamOptions o;
    o.eps = 0.5;
    o.seed = seed;
    o.bounds = exact_bounds(d);
    PointStream s = PointStream::shuffled(d, seed);
    const StreamResult r = fair_stream_gen(s, spec, o);
    memory_bad += r.stats.peak_memory_points > spec.total() * c.m * r.stats.guesses;
    good += r.solution.diversity >= opt / (30.0 * 1.5) && counts_at_least(r.solution, spec, 0.5);
  }
  return {good >= 27 && memory_bad == 0,
          std::to_string(good) + "/30 runs meet both bounds, " + std::to_string(memory_bad) + " memory violations"};
}

Outcome tau_gmm_two_approx() {
  int bad = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const Dataset d = testing::random_cloud(seed, 6 + seed % 9, 1, 2);
    const FairnessSpec spec{{std::min<std::size_t>(2 + seed % 4, d.size())}};
    const double opt = brute_force_opt(d, spec).diversity;
    const auto s = tau_gmm(d, all_of(d), opt / 2.0, spec.quotas[0]);
    bad += s.size() != spec.quotas[0] || diversity(d, s) < opt / 2.0;
  }
  return {bad == 0, std::to_string(bad) + " violations over 100 instances"};
}

Outcome composability() {
  int bad = 0;
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const Dataset d = testing::random_cloud(seed, 10 + seed % 5, 2, 2);
    Rng rng(derive_seed(seed, "criterion-12"));
    const FairnessSpec spec = oracle_sized_quotas(d, rng);
    const std::size_t sites = 2 + seed % 2;
    const Partition p = partition_random(d, sites, seed);
    std::vector<LocalCoreset> locals;
    for (std::size_t s = 0; s < sites; ++s)
      if (!p[s].empty()) locals.push_back(local_coreset(d, p[s], spec, 0.5, 0.0, s));
    const ComposedCoreset c = compose(d, locals, spec, 0.5, 0.0);
    const double opt = brute_force_opt(d, spec).diversity;
    bad += c.points.size() > c.bound;
    bad += brute_force_opt(restrict_to(d, c.points).data, spec).diversity < opt / 1.5;
  }
  return {bad == 0, std::to_string(bad) + " violations over 30 partitioned instances"};
}

Outcome determinism() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "fairdiv_acceptance";
  fs::create_directories(dir);
  const std::string pts = (dir / "points.csv").string(), mat = (dir / "matrix.txt").string();
  std::ostringstream sink, err;
  cli::run({"gen", "--n", "40", "--m", "2", "--seed", "3", "--out", pts}, sink, err);
  cli::run({"gen", "--n", "25", "--m", "3", "--dim", "0", "--seed", "4", "--out", mat}, sink, err);
  const std::string a = std::string(FAIRDIV_FIXTURES) + "/fix_a.csv";
  const std::vector<std::vector<std::string>> commands = {
      {"solve", "--algo", "lp2", pts, "--k", "1=3,2=3"},
      {"solve", "--algo", "lp6", pts, "--k", "1=3,2=3"},
      {"solve", "--algo", "lp6", mat, "--k", "1=2,2=2,3=1", "--grid-eps", "0.2"},
      {"solve", "--algo", "euclidean", pts, "--k", "1=2,2=2"},
      {"solve", "--algo", "greedy-flow", mat, "--k", "1=2,2=2,3=1"},
      {"stream", "--algo", "gen", pts, "--k", "1=3,2=3", "--shuffle-seed", "9"},
      {"stream", "--algo", "euclidean", a, "--k", "a=2,b=1", "--shuffle-seed", "9"},
      {"stream", "--algo", "two-groups", pts, "--k", "1=3,2=2", "--shuffle-seed", "9"},
      {"distributed", pts, "--k", "1=2,2=2", "--sites", "3", "--final", "lp6"},
      {"distributed", a, "--k", "a=2,b=1", "--sites", "2", "--final", "euclidean"},
      {"gen", "--n", "30", "--m", "3"},
  };
  int same = 0;
  for (auto args : commands) {
    args.insert(args.end(), {"--seed", "7"});
    std::ostringstream o1, o2, e1, e2;
    const int c1 = cli::run(args, o1, e1), c2 = cli::run(args, o2, e2);
    same += c1 == c2 && o1.str() == o2.str() && !o1.str().empty();
  }
  fs::remove_all(dir);
  const int n = static_cast<int>(commands.size());
  return {same == n, std::to_string(same) + "/" + std::to_string(n) + " commands reproduce byte-identical output"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"line exactness", line_exactness},
      {"greedy-flow factor", greedy_flow_factor},
      {"tight example", tight_example},
      {"expected fairness", expected_fairness},
      {"concentrated rounding", concentrated_rounding},
      {"coreset quality", coreset_quality},
      {"grid shift success", shift_success},
      {"bi-criteria euclidean", bicriteria},
      {"streaming two groups", stream_two_groups},
      {"streaming general", stream_general},
      {"tau-gmm 2-approximation", tau_gmm_two_approx},
      {"composability", composability},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome r;
    try {
      r = criteria[i].second();
    } catch (const std::exception& e) {
      r = {false, std::string("threw: ") + e.what()};
    }
    failed += !r.pass;
    std::printf("%s %2zu %s: %s\n", r.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), r.detail.c_str());
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}
