#include "fairdiv/cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "fairdiv/distributed.hpp"
#include "fairdiv/euclidean.hpp"
#include "fairdiv/greedy_flow.hpp"
#include "fairdiv/io.hpp"
#include "fairdiv/lp_rounding.hpp"
#include "fairdiv/oracle.hpp"
#include "fairdiv/streaming.hpp"
#include "fairdiv/synthetic.hpp"

namespace fairdiv::cli {

namespace {

using Json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

class UsageError : public Error {
 public:
  using Error::Error;
};

struct Common {
  std::string input;
  std::string format = "auto";
  std::string quotas;
  double eps = 0.0;
  CLI::Option* eps_opt = nullptr;
  double delta = 0.1;
  std::uint64_t seed = 0;
  double lambda = 0.0;
  std::size_t jobs = 1;
  bool verify = false;
  bool timing = false;
  bool validate = false;

  double eps_or(double fallback) const { return eps_opt && eps_opt->count() > 0 ? eps : fallback; }
};

// Guarantee an algorithm promises: div >= l*/alpha, counts >= ceil(beta k_i).
struct Contract {
  double alpha = 1.0;
  std::optional<double> beta = 1.0;
};

struct Outcome {
  Solution solution;
  Contract contract;
  Json params = Json::object();
  Json extra = Json::object();
};

Json real(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

std::string issue_name(IssueKind k) {
  switch (k) {
    case IssueKind::QuotaCount: return "quota-count";
    case IssueKind::QuotaExceedsGroup: return "quota-exceeds-group";
    case IssueKind::EmptyQuota: return "empty-quota";
    case IssueKind::EmptyGroup: return "empty-group";
    case IssueKind::DimensionMismatch: return "dimension-mismatch";
    case IssueKind::Asymmetric: return "asymmetric";
    case IssueKind::NonzeroDiagonal: return "nonzero-diagonal";
    case IssueKind::Negative: return "negative";
    case IssueKind::NotFinite: return "not-finite";
    case IssueKind::TriangleViolation: return "triangle-violation";
    case IssueKind::TriangleCheckSkipped: return "triangle-check-skipped";
  }
  return "unknown";
}

InputFormat parse_format(const std::string& f) {
  if (f == "auto") return InputFormat::Auto;
  if (f == "points") return InputFormat::Points;
  if (f == "matrix") return InputFormat::Matrix;
  throw UsageError("unknown --format '" + f + "' (auto, points, matrix)");
}

Dataset load(const Common& c) {
  const InputFormat f = parse_format(c.format);
  try {
    return read_dataset(c.input, f);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

FairnessSpec load_spec(const Dataset& data, const Common& c) {
  if (c.quotas.empty()) throw UsageError("--k is required, e.g. --k " + data.group_labels().front() + "=2");
  FairnessSpec spec;
  try {
    spec = parse_quotas(data, c.quotas);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  const ValidationReport r = validate(data, spec);
  for (const Issue& i : r.issues) {
    if (i.kind != IssueKind::TriangleCheckSkipped) throw UsageError(i.message);
  }
  return spec;
}

void require_coordinates(const Dataset& data, const std::string& what) {
  if (!data.is_euclidean()) throw UsageError(what + " needs point coordinates, but the input is a distance matrix");
}

Json group_map(const Dataset& data, const std::vector<std::size_t>& values) {
  Json j = Json::object();
  for (std::size_t g = 0; g < data.num_groups(); ++g) j[data.group_labels()[g]] = values[g];
  return j;
}

Json ids_of(const Dataset& data, const std::vector<std::size_t>& idx) {
  Json j = Json::array();
  for (std::size_t p : idx) j.push_back(data.point(p).id);
  return j;
}

Json header(const std::string& command, const std::string& algorithm, const Common& c, const Dataset& data,
            const FairnessSpec* spec) {
  Json j;
  j["command"] = command;
  if (!algorithm.empty()) j["algorithm"] = algorithm;
  j["input"] = c.input;
  j["n"] = data.size();
  j["groups"] = data.group_labels();
  j["metric"] = data.is_euclidean() ? "euclidean" : "matrix";
  if (data.is_euclidean()) j["dimension"] = data.dimension();
  if (spec) j["quotas"] = group_map(data, spec->quotas);
  if (c.validate) {
    Json issues = Json::array();
    for (const Issue& i : validate(data).issues) issues.push_back({{"kind", issue_name(i.kind)}, {"message", i.message}});
    j["validation"] = issues;
  }
  return j;
}

Json solution_json(const Dataset& data, const Solution& s) {
  // Recomputed from the ids so the report cannot drift from them.
  const double div = diversity(data, s.selected);
  if (!(div == s.diversity || (std::isinf(div) && std::isinf(s.diversity)))) {
    throw Error("internal: reported diversity does not match the selected points");
  }
  Json j;
  j["selected"] = ids_of(data, s.selected);
  j["diversity"] = real(div);
  j["group_counts"] = group_map(data, s.group_counts);
  j["gamma_used"] = s.gamma_used ? real(*s.gamma_used) : Json(nullptr);
  j["trials"] = s.trials;
  j["diagnostics"] = s.diagnostics;
  return j;
}

// Adds the contract and optional oracle check; returns true when the contract holds.
bool add_verdict(Json& report, const Dataset& data, const FairnessSpec& spec, const Solution& s, const Contract& k,
                 bool verify_with_oracle) {
  bool fair = true;
  std::vector<std::size_t> needed(spec.groups(), 0);
  if (k.beta) {
    for (std::size_t g = 0; g < spec.groups(); ++g) {
      needed[g] = ceil_count(*k.beta * static_cast<double>(spec.quotas[g]));
      fair = fair && s.group_counts[g] >= needed[g];
    }
  }
  Json c;
  c["alpha"] = k.alpha;
  c["beta"] = k.beta ? Json(*k.beta) : Json(nullptr);
  c["required_counts"] = group_map(data, needed);
  c["fairness_ok"] = fair;
  bool met = fair;
  if (verify_with_oracle) {
    Json v;
    try {
      const Verdict verdict = verify(data, spec, s, k.alpha, k.beta.value_or(1.0));
      v["optimum"] = real(verdict.optimum);
      v["required_diversity"] = real(verdict.required_diversity);
      v["diversity_ok"] = verdict.diversity_ok;
      v["fairness_ok"] = verdict.fairness_ok;
      v["pass"] = k.beta ? verdict.pass : verdict.diversity_ok;
      met = met && v["pass"].get<bool>();
    } catch (const Error& e) {
      v["error"] = e.what();
      met = false;
    }
    report["verify"] = v;
  }
  c["met"] = met;
  report["contract"] = c;
  return met;
}

int emit(Json& report, const Common& c, Clock::time_point start, std::ostream& out, bool met) {
  if (c.timing) {
    report["timing"] = {
        {"wall_ms", std::chrono::duration<double, std::milli>(Clock::now() - start).count()}};
  }
  out << report.dump(2) << '\n';
  return met ? kExitOk : kExitFailed;
}

Json base_params(const Common& c, double eps) {
  return {{"eps", eps}, {"delta", c.delta}, {"seed", c.seed}, {"lambda", c.lambda}};
}

const std::vector<std::string> kSolveAlgos = {"brute", "lp2", "lp6", "greedy-flow", "line", "euclidean"};

void check_solve_mode(const std::string& algo, const Dataset& data) {
  if (algo == "line") {
    require_coordinates(data, "line");
    if (data.dimension() != 1) throw UsageError("line needs 1-D points, input has dimension " + std::to_string(data.dimension()));
  }
  if (algo == "euclidean") require_coordinates(data, "euclidean");
}

Outcome solve_with(const std::string& algo, const Dataset& data, const FairnessSpec& spec, const Common& c,
                   std::optional<double> grid_eps) {
  Outcome o;
  const double m = static_cast<double>(data.num_groups());
  if (algo == "brute") {
    o.solution = brute_force_opt(data, spec);
    o.contract = {1.0, 1.0};
  } else if (algo == "line") {
    o.solution = fair_line_opt(data, spec);
    o.contract = {1.0, 1.0};
  } else if (algo == "greedy-flow") {
    GreedyFlowOptions g;
    g.eps = c.eps_or(0.1);
    g.jobs = c.jobs;
    o.solution = fair_greedy_flow_search(data, spec, g);
    o.contract = {(m + 1.0) * (1.0 + g.eps), 1.0};
    o.params = {{"eps", g.eps}};
    Json clusters = Json::array();
    for (const auto& cl : build_clusters(data, spec, *o.solution.gamma_used).clusters) clusters.push_back(ids_of(data, cl));
    o.extra["clusters"] = clusters;
  } else if (algo == "lp2" || algo == "lp6") {
    LpPipelineOptions lp;
    lp.mode = algo == "lp2" ? RoundingMode::Expected2 : RoundingMode::Concentrated6;
    lp.eps = c.eps_or(0.5);
    lp.delta = c.delta;
    lp.seed = c.seed;
    lp.grid_eps = grid_eps;
    o.solution = lp_pipeline(data, spec, lp);
    const double slack = 1.0 + grid_eps.value_or(0.0);
    if (algo == "lp2") {
      o.contract = {2.0 * slack, std::nullopt};
      o.params = {{"seed", c.seed}};
    } else {
      o.contract = {6.0 * slack, 1.0 - lp.eps};
      o.params = {{"eps", lp.eps}, {"delta", lp.delta}, {"seed", c.seed}};
    }
    if (grid_eps) o.params["grid_eps"] = *grid_eps;
  } else if (algo == "euclidean") {
    EuclideanSearchOptions e;
    e.eps = c.eps_or(0.5);
    e.delta = c.delta;
    e.lambda = c.lambda;
    e.seed = c.seed;
    e.jobs = c.jobs;
    o.solution = fair_euclidean_search(data, spec, e);
    o.contract = {1.0 + e.eps, 1.0 - e.eps};
    o.params = base_params(c, e.eps);
  } else {
    throw UsageError("unknown --algo '" + algo + "'");
  }
  return o;
}

int cmd_solve(const Common& c, const std::string& algo, std::optional<double> grid_eps, std::ostream& out) {
  const auto start = Clock::now();
  const Dataset data = load(c);
  const FairnessSpec spec = load_spec(data, c);
  check_solve_mode(algo, data);
  Outcome o = solve_with(algo, data, spec, c, grid_eps);
  Json report = header("solve", algo, c, data, &spec);
  report["params"] = o.params;
  report["solution"] = solution_json(data, o.solution);
  for (auto& [key, value] : o.extra.items()) report[key] = value;
  const bool met = add_verdict(report, data, spec, o.solution, o.contract, c.verify);
  return emit(report, c, start, out, met);
}

struct StreamFlags {
  std::string algo;
  double dmin_lb = 0.0, dmax_ub = 0.0;
  CLI::Option *dmin_opt = nullptr, *dmax_opt = nullptr, *shuffle_opt = nullptr;
  std::uint64_t shuffle_seed = 0;
};

int cmd_stream(const Common& c, const StreamFlags& f, std::ostream& out) {
  const auto start = Clock::now();
  const Dataset data = load(c);
  const FairnessSpec spec = load_spec(data, c);
  if (f.algo == "euclidean") require_coordinates(data, "stream euclidean");
  if (f.algo == "two-groups" && data.num_groups() != 2) {
    throw UsageError("two-groups needs exactly 2 groups, input has " + std::to_string(data.num_groups()));
  }
  if (f.algo != "gen" && f.algo != "euclidean" && f.algo != "two-groups") {
    throw UsageError("unknown stream --algo '" + f.algo + "' (gen, euclidean, two-groups)");
  }
  StreamOptions so;
  const bool given_lb = f.dmin_opt->count() > 0, given_ub = f.dmax_opt->count() > 0;
  if (!given_lb || !given_ub) so.bounds = exact_bounds(data);
  if (given_lb) so.bounds.d_min_lb = f.dmin_lb;
  if (given_ub) so.bounds.d_max_ub = f.dmax_ub;
  if (!(so.bounds.d_min_lb > 0.0 && so.bounds.d_max_ub >= so.bounds.d_min_lb)) {
    throw UsageError("distance bounds must satisfy 0 < dmin-lb <= dmax-ub");
  }
  so.eps = c.eps_or(f.algo == "two-groups" ? 0.1 : 0.5);
  so.delta = c.delta;
  so.lambda = c.lambda;
  so.seed = c.seed;
  so.jobs = c.jobs;
  if (f.algo == "euclidean" && !(so.eps > 0.0 && so.eps <= 1.0)) throw UsageError("eps must lie in (0, 1]");

  PointStream stream = f.shuffle_opt->count() > 0 ? PointStream::shuffled(data, f.shuffle_seed) : PointStream(data);
  StreamResult r;
  Contract k;
  if (f.algo == "gen") {
    r = fair_stream_gen(stream, spec, so);
    k = {30.0 * (1.0 + so.eps), 1.0 - so.eps};
  } else if (f.algo == "euclidean") {
    r = fair_stream_euclidean(stream, spec, so);
    k = {1.0 + so.eps, 1.0 - so.eps};
  } else {
    r = fair_stream_two_groups(stream, spec, so);
    k = {4.0 * (1.0 + so.eps), 1.0};
  }
  Json report = header("stream", f.algo, c, data, &spec);
  report["params"] = base_params(c, so.eps);
  report["params"]["dmin_lb"] = so.bounds.d_min_lb;
  report["params"]["dmax_ub"] = so.bounds.d_max_ub;
  report["params"]["bounds"] = given_lb && given_ub ? "given" : "computed";
  if (f.shuffle_opt->count() > 0) report["params"]["shuffle_seed"] = f.shuffle_seed;
  report["solution"] = solution_json(data, r.solution);
  report["memory"] = {{"peak_points", r.stats.peak_memory_points},
                      {"max_points_per_guess", r.stats.max_guess_points},
                      {"pooled_points", r.stats.pooled_points},
                      {"guesses", r.stats.guesses},
                      {"points_seen", r.stats.points_seen}};
  const bool met = add_verdict(report, data, spec, r.solution, k, c.verify);
  return emit(report, c, start, out, met);
}

struct DistFlags {
  std::size_t sites = 2;
  std::string partition = "round-robin";
  std::string final_solver = "brute";
};

int cmd_distributed(const Common& c, const DistFlags& f, std::ostream& out) {
  const auto start = Clock::now();
  const Dataset data = load(c);
  const FairnessSpec spec = load_spec(data, c);
  FinalSolver solver;
  Partition partition;
  try {
    solver = parse_final_solver(f.final_solver);
    partition = make_partition(data, f.sites, f.partition);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  if (!data.is_euclidean() && !(c.lambda > 0.0)) throw UsageError("matrix input needs --lambda for the local coresets");
  if (solver == FinalSolver::Euclidean) require_coordinates(data, "the euclidean final solver");
  DistributedOptions o;
  o.eps = c.eps_or(0.5);
  if (!(o.eps > 0.0 && o.eps <= 1.0)) throw UsageError("eps must lie in (0, 1]");
  o.delta = c.delta;
  o.lambda = c.lambda;
  o.seed = c.seed;
  o.jobs = c.jobs;
  o.solver = solver;
  const DistributedResult r = two_round_solve(data, partition, spec, o);
  Contract k;
  switch (solver) {
    case FinalSolver::Brute: k = {1.0 + o.eps, 1.0}; break;
    case FinalSolver::Euclidean: k = {(1.0 + o.eps) * (1.0 + o.eps), 1.0 - o.eps}; break;
    case FinalSolver::Lp6: k = {6.0 * (1.0 + o.eps), 1.0 - o.eps}; break;
  }
  Json report = header("distributed", to_string(solver), c, data, &spec);
  report["params"] = base_params(c, o.eps);
  report["params"]["sites"] = partition.size();
  report["params"]["partition"] = f.partition;
  report["solution"] = solution_json(data, r.solution);
  Json sites = Json::array();
  for (const auto& m : r.ledger.messages) sites.push_back({{"site", m.from_site}, {"records", m.records}});
  std::vector<double> radius = r.coreset.group_radius;
  Json radii = Json::object();
  for (std::size_t g = 0; g < data.num_groups(); ++g) radii[data.group_labels()[g]] = real(radius[g]);
  report["coreset"] = {{"points", r.coreset.points.size()}, {"bound", r.coreset.bound}, {"group_radius", radii}};
  report["messages"] = sites;
  report["memory"] = {{"records_sent", r.ledger.total_records()}};
  const bool met = add_verdict(report, data, spec, r.solution, k, c.verify);
  return emit(report, c, start, out, met);
}

int cmd_coreset(const Common& c, std::ostream& out) {
  const auto start = Clock::now();
  const Dataset data = load(c);
  const FairnessSpec spec = load_spec(data, c);
  if (!data.is_euclidean() && !(c.lambda > 0.0)) throw UsageError("matrix input needs --lambda");
  const double eps = c.eps_or(0.5);
  if (!(eps > 0.0)) throw UsageError("eps must be positive");
  const CoresetBundle b = build_coreset(data, spec, eps, c.lambda);
  Json report = header("coreset", "", c, data, &spec);
  report["params"] = {{"eps", eps}, {"lambda", b.lambda}};
  report["bound"] = b.bound;
  report["size"] = b.points().size();
  Json groups = Json::object();
  for (std::size_t g = 0; g < data.num_groups(); ++g) {
    Json radii = Json::array();
    for (double r : b.groups[g].radii) radii.push_back(real(r));
    groups[data.group_labels()[g]] = {{"ids", ids_of(data, b.groups[g].order)}, {"radii", radii}};
  }
  report["coreset"] = groups;
  return emit(report, c, start, out, true);
}

int cmd_verify(const Common& c, const std::string& ids, double alpha, double beta, std::ostream& out) {
  const auto start = Clock::now();
  const Dataset data = load(c);
  const FairnessSpec spec = load_spec(data, c);
  if (!(alpha >= 1.0)) throw UsageError("--alpha must be >= 1");
  if (!(beta > 0.0 && beta <= 1.0)) throw UsageError("--beta must lie in (0, 1]");
  std::vector<std::size_t> picked;
  for (const std::string& id : split_fields(ids)) {
    std::optional<std::size_t> hit;
    for (std::size_t i = 0; i < data.size() && !hit; ++i)
      if (data.point(i).id == id) hit = i;
    if (!hit) throw UsageError("unknown point id '" + id + "'");
    if (std::find(picked.begin(), picked.end(), *hit) != picked.end()) throw UsageError("point '" + id + "' listed twice");
    picked.push_back(*hit);
  }
  const Solution s = make_solution(data, std::move(picked), "given");
  Json report = header("verify", "", c, data, &spec);
  report["solution"] = solution_json(data, s);
  const bool met = add_verdict(report, data, spec, s, {alpha, beta}, true);
  return emit(report, c, start, out, met);
}

int cmd_gen(const SyntheticConfig& cfg, const std::string& path, std::ostream& out) {
  if (cfg.m == 0 || cfg.n < cfg.m) throw UsageError("need n >= m >= 1");
  const Dataset d = generate_synthetic(cfg);
  std::ofstream file;
  if (!path.empty()) {
    file.open(path);
    if (!file) throw UsageError("cannot write " + path);
  }
  std::ostream& dest = path.empty() ? out : file;
  if (d.is_euclidean()) {
    write_points_csv(dest, d);
  } else {
    write_matrix(dest, d);
  }
  return kExitOk;
}

int cmd_bench(Common c, const SyntheticConfig& cfg, const std::string& algos, std::size_t repeat, std::ostream& out) {
  Dataset data;
  if (c.input.empty()) {
    data = generate_synthetic(cfg);
    c.input = "synthetic";
  } else {
    data = load(c);
  }
  if (c.quotas.empty()) {
    for (const auto& l : data.group_labels()) c.quotas += (c.quotas.empty() ? "" : ",") + l + "=2";
  }
  const FairnessSpec spec = load_spec(data, c);
  Json report = header("bench", "", c, data, &spec);
  if (c.input == "synthetic") {
    report["synthetic"] = {{"n", cfg.n}, {"m", cfg.m}, {"dim", cfg.dim}, {"clusters", cfg.clusters}, {"seed", cfg.seed}};
  }
  Json runs = Json::array();
  bool all_met = true;
  for (const std::string& algo : split_fields(algos)) {
    check_solve_mode(algo, data);
    Json entry;
    entry["algorithm"] = algo;
    std::vector<double> ms;
    Outcome first;
    for (std::size_t r = 0; r < std::max<std::size_t>(repeat, 1); ++r) {
      const auto t0 = Clock::now();
      Outcome o = solve_with(algo, data, spec, c, std::nullopt);
      ms.push_back(std::chrono::duration<double, std::milli>(Clock::now() - t0).count());
      if (r == 0) first = std::move(o);
    }
    entry["params"] = first.params;
    entry["diversity"] = real(first.solution.diversity);
    entry["group_counts"] = group_map(data, first.solution.group_counts);
    entry["wall_ms"] = ms;
    std::sort(ms.begin(), ms.end());
    entry["median_ms"] = ms[ms.size() / 2];
    Json verdict;
    all_met = add_verdict(verdict, data, spec, first.solution, first.contract, c.verify) && all_met;
    entry["contract"] = verdict["contract"];
    if (verdict.contains("verify")) entry["verify"] = verdict["verify"];
    runs.push_back(entry);
  }
  report["runs"] = runs;
  out << report.dump(2) << '\n';
  return all_met ? kExitOk : kExitFailed;
}

void add_common(CLI::App* cmd, Common& c, bool input_required = true) {
  auto* in = cmd->add_option("input", c.input, "dataset: points CSV or distance matrix");
  if (input_required) in->required();
  cmd->add_option("--format", c.format, "auto, points or matrix")->capture_default_str();
  cmd->add_option("--k", c.quotas, "quotas by group label, e.g. a=2,b=1");
  c.eps_opt = cmd->add_option("--eps", c.eps, "approximation / fairness slack (algorithm default if unset)");
  cmd->add_option("--delta", c.delta, "failure probability")->capture_default_str();
  cmd->add_option("--seed", c.seed, "seed for all randomness")->capture_default_str();
  cmd->add_option("--lambda", c.lambda, "doubling dimension (default: the point dimension)");
  cmd->add_option("--jobs", c.jobs, "worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_flag("--verify", c.verify, "check the result against the exact optimum");
  cmd->add_flag("--timing", c.timing, "add wall time to the report");
  cmd->add_flag("--validate", c.validate, "include input validation findings");
}

void add_synthetic(CLI::App* cmd, SyntheticConfig& cfg) {
  cmd->add_option("--n", cfg.n, "points")->capture_default_str();
  cmd->add_option("--m", cfg.m, "groups")->capture_default_str();
  cmd->add_option("--dim", cfg.dim, "dimension; 0 writes a distance matrix")->capture_default_str();
  cmd->add_option("--clusters", cfg.clusters, "blob count")->capture_default_str();
  cmd->add_option("--spread", cfg.spread, "blob standard deviation")->capture_default_str();
  cmd->add_option("--extent", cfg.extent, "range of blob centres")->capture_default_str();
  cmd->add_option("--edge-prob", cfg.edge_prob, "extra edge probability in matrix mode")->capture_default_str();
}

}  // namespace

FairnessSpec parse_quotas(const Dataset& data, const std::string& text) {
  FairnessSpec spec;
  spec.quotas.assign(data.num_groups(), 0);
  std::vector<bool> given(data.num_groups(), false);
  for (const std::string& item : split_fields(text)) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw Error("quota '" + item + "' must look like label=count");
    const std::string label = item.substr(0, eq), count = item.substr(eq + 1);
    const auto g = data.find_group(label);
    if (!g) throw Error("no group labelled '" + label + "' in the input");
    if (given[*g]) throw Error("quota for group '" + label + "' given twice");
    std::size_t k = 0;
    const auto [ptr, ec] = std::from_chars(count.data(), count.data() + count.size(), k);
    if (ec != std::errc() || ptr != count.data() + count.size()) {
      throw Error("quota for group '" + label + "' is not a non-negative integer: '" + count + "'");
    }
    spec.quotas[*g] = k;
    given[*g] = true;
  }
  for (std::size_t g = 0; g < data.num_groups(); ++g) {
    if (!given[g] && !data.group_members(g).empty()) {
      throw Error("missing quota for group '" + data.group_labels()[g] + "'");
    }
  }
  return spec;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fair max-min diversification"};
  app.name("fairdiv");
  app.require_subcommand(1);

  Common c;
  std::string algo;
  std::optional<double> grid_eps;
  double grid_eps_value = 0.0;
  auto* solve = app.add_subcommand("solve", "pick a fair, diverse subset");
  add_common(solve, c);
  solve->add_option("--algo", algo, "brute, lp2, lp6, greedy-flow, line or euclidean")->required();
  auto* grid_opt = solve->add_option("--grid-eps", grid_eps_value, "LP search on a geometric grid with this ratio");

  StreamFlags sf;
  auto* stream = app.add_subcommand("stream", "single pass over the input in file order");
  add_common(stream, c);
  stream->add_option("--algo", sf.algo, "gen, euclidean or two-groups")->required();
  sf.dmin_opt = stream->add_option("--dmin-lb", sf.dmin_lb, "lower bound on the smallest distance");
  sf.dmax_opt = stream->add_option("--dmax-ub", sf.dmax_ub, "upper bound on the largest distance");
  sf.shuffle_opt = stream->add_option("--shuffle-seed", sf.shuffle_seed, "permute the stream order");

  DistFlags df;
  auto* dist = app.add_subcommand("distributed", "two-round coreset protocol over simulated sites");
  add_common(dist, c);
  dist->add_option("--sites", df.sites, "number of sites")->capture_default_str()->check(CLI::PositiveNumber);
  dist->add_option("--partition", df.partition, "round-robin, by-hash or file:<path>")->capture_default_str();
  dist->add_option("--final", df.final_solver, "brute, euclidean or lp6")->capture_default_str();

  auto* coreset = app.add_subcommand("coreset", "per-group farthest-point coreset");
  add_common(coreset, c);

  std::string ids;
  double alpha = 1.0, beta = 1.0;
  auto* ver = app.add_subcommand("verify", "check a given selection against the exact optimum");
  add_common(ver, c);
  ver->add_option("--ids", ids, "selected point ids, comma separated")->required();
  ver->add_option("--alpha", alpha, "allowed approximation factor")->capture_default_str();
  ver->add_option("--beta", beta, "required fraction of each quota")->capture_default_str();

  SyntheticConfig cfg;
  std::string gen_out;
  auto* gen = app.add_subcommand("gen", "write a synthetic dataset");
  add_synthetic(gen, cfg);
  gen->add_option("--seed", cfg.seed, "generator seed")->capture_default_str();
  gen->add_option("--out", gen_out, "output path (default stdout)");

  SyntheticConfig bench_cfg;
  std::string algos = "greedy-flow,lp2,lp6";
  std::size_t repeat = 3;
  auto* bench = app.add_subcommand("bench", "time algorithms on one dataset");
  add_common(bench, c, false);
  add_synthetic(bench, bench_cfg);
  bench->add_option("--algos", algos, "comma-separated solve algorithms")->capture_default_str();
  bench->add_option("--repeat", repeat, "runs per algorithm")->capture_default_str();
  bench->add_option("--gen-seed", bench_cfg.seed, "seed for the synthetic dataset")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  if (grid_opt->count() > 0) grid_eps = grid_eps_value;

  try {
    if (solve->parsed()) {
      if (std::find(kSolveAlgos.begin(), kSolveAlgos.end(), algo) == kSolveAlgos.end()) {
        throw UsageError("unknown --algo '" + algo + "' (brute, lp2, lp6, greedy-flow, line, euclidean)");
      }
      if (grid_eps && !(*grid_eps > 0.0)) throw UsageError("--grid-eps must be positive");
      return cmd_solve(c, algo, grid_eps, out);
    }
    if (stream->parsed()) return cmd_stream(c, sf, out);
    if (dist->parsed()) return cmd_distributed(c, df, out);
    if (coreset->parsed()) return cmd_coreset(c, out);
    if (ver->parsed()) return cmd_verify(c, ids, alpha, beta, out);
    if (gen->parsed()) return cmd_gen(cfg, gen_out, out);
    if (bench->parsed()) return cmd_bench(c, bench_cfg, algos, repeat, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailed;
  }
  return kExitUsage;
}

}  // namespace fairdiv::cli
