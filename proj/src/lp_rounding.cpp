#include "fairdiv/lp_rounding.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include "fairdiv/io.hpp"

namespace fairdiv {

LPInstance build_lp(const Dataset& data, const FairnessSpec& spec, double gamma) {
  if (!(gamma > 0.0)) throw Error("gamma must be positive");
  if (spec.groups() != data.num_groups()) throw Error("quota count does not match group count");
  LPInstance lp;
  lp.num_vars = data.size();
  lp.gamma = gamma;
  for (std::size_t g = 0; g < spec.groups(); ++g) {
    LinearRow row;
    row.sense = LinearRow::Sense::GE;
    for (std::size_t j : data.group_members(g)) row.coefs.emplace_back(j, 1.0);
    row.rhs = static_cast<double>(spec.quotas[g]);
    lp.rows.push_back(std::move(row));
  }
  lp.num_group_rows = lp.rows.size();
  for (std::size_t p = 0; p < data.size(); ++p) {
    LinearRow row;
    row.sense = LinearRow::Sense::LE;
    for (std::size_t q : ball_members(data, p, gamma / 2.0)) row.coefs.emplace_back(q, 1.0);
    row.rhs = 1.0;
    lp.rows.push_back(std::move(row));
  }
  return lp;
}

void write_lp(std::ostream& out, const LPInstance& lp) {
  for (const LinearRow& row : lp.rows) {
    out << (row.sense == LinearRow::Sense::GE ? "GE " : "LE ");
    for (std::size_t t = 0; t < row.coefs.size(); ++t) {
      out << (t ? "," : "") << row.coefs[t].first << ':' << format_real(row.coefs[t].second);
    }
    out << ' ' << format_real(row.rhs) << '\n';
  }
}

double max_violation(const LPInstance& lp, const std::vector<double>& x) {
  double worst = 0.0;
  for (double v : x) worst = std::max(worst, -v);
  for (const LinearRow& row : lp.rows) {
    double lhs = 0.0;
    for (const auto& [j, c] : row.coefs) lhs += c * x[j];
    const double gap = row.sense == LinearRow::Sense::GE ? row.rhs - lhs : lhs - row.rhs;
    worst = std::max(worst, gap);
  }
  return worst;
}

namespace {

// Dense tableau for the phase-1 problem: minimise the sum of artificials.
class Phase1 {
 public:
  explicit Phase1(const LPInstance& lp) : lp_(lp) {
    rows_ = lp.rows.size();
    std::size_t col = lp.num_vars;
    std::vector<std::size_t> slack(rows_), art(rows_, kNone);
    for (std::size_t r = 0; r < rows_; ++r) slack[r] = col++;
    for (std::size_t r = 0; r < rows_; ++r) {
      if (lp.rows[r].sense == LinearRow::Sense::GE) art[r] = col++;
    }
    cols_ = col;
    first_art_ = lp.num_vars + rows_;
    width_ = cols_ + 1;
    t_.assign(rows_ * width_, 0.0);
    obj_.assign(width_, 0.0);
    basis_.resize(rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
      const LinearRow& row = lp.rows[r];
      for (const auto& [j, c] : row.coefs) at(r, j) += c;
      at(r, cols_) = row.rhs;
      if (row.sense == LinearRow::Sense::LE) {
        at(r, slack[r]) = 1.0;
        basis_[r] = slack[r];
      } else {
        at(r, slack[r]) = -1.0;
        at(r, art[r]) = 1.0;
        basis_[r] = art[r];
        // Reduced costs of the phase-1 objective: minus the sum of GE rows.
        for (std::size_t c = 0; c < width_; ++c) {
          if (c < first_art_ || c == cols_) obj_[c] -= at(r, c);
        }
      }
    }
  }

  void solve() {
    const double tol = kLpTolerance;
    while (-obj_[cols_] > tol) {
      // Most negative reduced cost; Bland's first-index rule while stalled so
      // degenerate pivots cannot cycle.
      const bool bland = stalled_ > kStallLimit;
      std::size_t enter = kNone;
      for (std::size_t c = 0; c < first_art_; ++c) {
        if (obj_[c] < -tol && (enter == kNone || (!bland && obj_[c] < obj_[enter]))) {
          enter = c;
          if (bland) break;
        }
      }
      if (enter == kNone) break;
      // Smallest ratio over pivots that are not tiny, then Bland's rule among
      // rows within a hair of it.
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t r = 0; r < rows_; ++r) {
        const double a = at(r, enter);
        if (a > kPivotTolerance) best = std::min(best, std::max(0.0, at(r, cols_)) / a);
      }
      std::size_t leave = kNone;
      const double limit = best + 1e-12 * (1.0 + std::abs(best));
      for (std::size_t r = 0; r < rows_; ++r) {
        const double a = at(r, enter);
        if (a <= kPivotTolerance || std::max(0.0, at(r, cols_)) / a > limit) continue;
        if (leave == kNone || basis_[r] < basis_[leave]) leave = r;
      }
      if (leave == kNone) break;  // cannot happen: phase 1 is bounded below
      if (pivots_ > kPivotLimitFactor * (rows_ + cols_)) throw Error("LP solver exceeded its pivot limit");
      const double before = obj_[cols_];
      pivot(leave, enter);
      ++pivots_;
      stalled_ = obj_[cols_] > before + tol ? 0 : stalled_ + 1;
    }
  }

  double objective() const { return -obj_[cols_]; }
  std::size_t pivots() const { return pivots_; }

  std::vector<double> primal() const {
    std::vector<double> x(lp_.num_vars, 0.0);
    for (std::size_t r = 0; r < rows_; ++r) {
      if (basis_[r] < lp_.num_vars) x[basis_[r]] = std::max(0.0, at(r, cols_));
    }
    return x;
  }

 private:
  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  static constexpr std::size_t kStallLimit = 50;
  static constexpr double kPivotTolerance = 1e-7;
  static constexpr double kDropTolerance = 1e-13;
  static constexpr std::size_t kPivotLimitFactor = 50;

  double& at(std::size_t r, std::size_t c) { return t_[r * width_ + c]; }
  double at(std::size_t r, std::size_t c) const { return t_[r * width_ + c]; }

  void pivot(std::size_t pr, std::size_t pc) {
    double* prow = &t_[pr * width_];
    const double inv = 1.0 / prow[pc];
    for (std::size_t c = 0; c < width_; ++c) prow[c] *= inv;
    prow[pc] = 1.0;
    // Only the nonzero entries of the pivot row matter for the update.
    nz_.clear();
    for (std::size_t c = 0; c < width_; ++c) {
      if (prow[c] != 0.0) nz_.push_back(c);
    }
    auto eliminate = [&](double* row) {
      const double f = row[pc];
      if (f == 0.0) return;
      for (std::size_t c : nz_) {
        row[c] -= f * prow[c];
        if (std::abs(row[c]) < kDropTolerance) row[c] = 0.0;
      }
      row[pc] = 0.0;
    };
    for (std::size_t r = 0; r < rows_; ++r) {
      if (r != pr) eliminate(&t_[r * width_]);
    }
    eliminate(obj_.data());
    // Round-off can push a basic value just below zero; clamp it back.
    for (std::size_t r = 0; r < rows_; ++r) {
      if (at(r, cols_) < 0.0 && at(r, cols_) > -kLpTolerance) at(r, cols_) = 0.0;
    }
    basis_[pr] = pc;
  }

  const LPInstance& lp_;
  std::size_t rows_ = 0, cols_ = 0, width_ = 0, first_art_ = 0;
  std::vector<double> t_, obj_;
  std::vector<std::size_t> basis_, nz_;
  std::size_t pivots_ = 0;
  std::size_t stalled_ = 0;
};

std::vector<std::size_t> support_of(const std::vector<double>& x) {
  std::vector<std::size_t> s;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (x[j] > kSupportThreshold) s.push_back(j);
  }
  return s;
}

std::uint64_t bits_of(double x) { return std::bit_cast<std::uint64_t>(x); }

}  // namespace

FractionalSolution solve_feasibility(const LPInstance& lp) {
  FractionalSolution out;
  Phase1 simplex(lp);
  simplex.solve();
  out.pivots = simplex.pivots();
  out.feasible = simplex.objective() <= kLpTolerance;
  out.x = simplex.primal();
  if (out.feasible) {
    const double v = max_violation(lp, out.x);
    if (v > kLpTolerance) {
      throw Error("LP solver numerical failure at gamma " + format_real(lp.gamma) + ": residual " +
                  format_real(v));
    }
    out.support = support_of(out.x);
  }
  return out;
}

std::vector<std::size_t> weighted_permutation(const std::vector<double>& weights, Rng& rng) {
  std::vector<std::size_t> remaining;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    if (weights[j] < 0.0 || !std::isfinite(weights[j])) throw Error("weights must be finite and non-negative");
    if (weights[j] > 0.0) remaining.push_back(j);
  }
  if (remaining.empty()) throw Error("weighted permutation needs a positive weight");
  std::vector<std::size_t> order;
  order.reserve(remaining.size());
  while (!remaining.empty()) {
    double total = 0.0;
    for (std::size_t j : remaining) total += weights[j];
    const double u = rng.uniform() * total;
    double acc = 0.0;
    std::size_t pick = remaining.size() - 1;
    for (std::size_t t = 0; t < remaining.size(); ++t) {
      acc += weights[remaining[t]];
      if (u < acc) {
        pick = t;
        break;
      }
    }
    order.push_back(remaining[pick]);
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(pick));
  }
  return order;
}

std::vector<std::size_t> round_by_order(const Dataset& data, const std::vector<double>& weights, double radius,
                                        Rng& rng) {
  const auto order = weighted_permutation(weights, rng);
  constexpr std::size_t kAbsent = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> rank(weights.size(), kAbsent);
  for (std::size_t t = 0; t < order.size(); ++t) rank[order[t]] = t;
  std::vector<std::size_t> chosen;
  for (std::size_t j : order) {
    bool first = true;
    for (std::size_t l : order) {
      if (rank[l] < rank[j] && data.dist(j, l) < radius) {
        first = false;
        break;
      }
    }
    if (first) chosen.push_back(j);
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

Solution round_expected_fair(const Dataset& data, const FairnessSpec& spec, double gamma,
                             const std::vector<double>& x, Rng& rng) {
  (void)spec;
  Solution s = make_solution(data, round_by_order(data, x, gamma / 2.0, rng), "lp2");
  s.gamma_used = gamma;
  s.trials = 1;
  return s;
}

RedistributedSolution redistribute_weights(const Dataset& data, const FairnessSpec& spec, double gamma,
                                           const std::vector<double>& x) {
  (void)spec;
  RedistributedSolution out;
  out.gamma = gamma;
  out.y.assign(x.size(), 0.0);
  std::vector<bool> set(x.size(), false);
  const double radius = gamma / 3.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (set[j] || !(x[j] > 0.0)) continue;
    const std::size_t g = data.group_of(j);
    double mass = 0.0;
    for (std::size_t l : data.group_members(g)) {
      if (set[l] || data.dist(j, l) >= radius) continue;
      mass += x[l];
      set[l] = true;
    }
    out.y[j] = mass;
  }
  return out;
}

std::size_t concentrated_trials(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) return 1;
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(std::log2(1.0 / delta))));
}

bool concentration_regime(const FairnessSpec& spec, double eps) {
  const double need = 3.0 / (eps * eps) * std::log(2.0 * static_cast<double>(spec.groups()));
  for (std::size_t k : spec.quotas) {
    if (k > 0 && static_cast<double>(k) < need) return false;
  }
  return true;
}

Solution round_concentrated(const Dataset& data, const FairnessSpec& spec, double gamma,
                            const std::vector<double>& y, double eps, double delta, Rng& rng) {
  if (support_of(y).empty()) throw Error("concentrated rounding needs a nonempty support");
  std::vector<std::size_t> target;
  for (std::size_t k : spec.quotas) target.push_back(ceil_count((1.0 - eps) * static_cast<double>(k)));
  auto fill = [&](const std::vector<std::size_t>& counts) {
    double worst = kUnbounded;
    for (std::size_t g = 0; g < spec.groups(); ++g) {
      if (spec.quotas[g] > 0) {
        worst = std::min(worst, static_cast<double>(counts[g]) / static_cast<double>(spec.quotas[g]));
      }
    }
    return worst;
  };
  const std::size_t trials = concentrated_trials(delta);
  Solution best;
  double best_fill = -1.0;
  for (std::size_t t = 0; t < trials; ++t) {
    Solution s = make_solution(data, round_by_order(data, y, gamma / 6.0, rng), "lp6");
    s.gamma_used = gamma;
    s.trials = t + 1;
    bool fair = true;
    for (std::size_t g = 0; g < spec.groups(); ++g) fair = fair && s.group_counts[g] >= target[g];
    if (fair) return s;
    const double f = fill(s.group_counts);
    if (f > best_fill) {
      best_fill = f;
      best = std::move(s);
    }
  }
  best.trials = trials;
  best.diagnostics.push_back("no trial met the relaxed quotas; returning the best of " + std::to_string(trials));
  return best;
}

std::optional<LpSearchResult> lp_search(const Dataset& data, const FairnessSpec& spec,
                                        const GuessSchedule& schedule) {
  LpSearchResult result;
  std::optional<FractionalSolution> at_best;
  double best_gamma = -1.0;
  const auto g = largest_feasible(schedule, [&](double gamma) {
    ++result.lp_solves;
    FractionalSolution f = solve_feasibility(build_lp(data, spec, gamma));
    if (f.feasible && gamma > best_gamma) {
      best_gamma = gamma;
      at_best = std::move(f);
    }
    return at_best.has_value() && best_gamma == gamma;
  });
  if (!g) return std::nullopt;
  result.gamma = *g;
  result.fractional = std::move(*at_best);
  return result;
}

Solution trim_to_quotas(const Dataset& data, const FairnessSpec& spec, const Solution& solution) {
  std::vector<std::size_t> sel = solution.selected;
  std::vector<std::size_t> counts = group_counts(data, sel);
  std::size_t dropped = 0;
  while (true) {
    std::size_t worst = sel.size();
    double worst_gap = kUnbounded;
    for (std::size_t a = 0; a < sel.size(); ++a) {
      const std::size_t g = data.group_of(sel[a]);
      if (counts[g] <= spec.quotas[g]) continue;
      double gap = kUnbounded;
      for (std::size_t b = 0; b < sel.size(); ++b)
        if (b != a) gap = std::min(gap, data.dist(sel[a], sel[b]));
      if (gap < worst_gap || worst == sel.size()) {
        worst_gap = gap;
        worst = a;
      }
    }
    if (worst == sel.size()) break;
    --counts[data.group_of(sel[worst])];
    sel.erase(sel.begin() + static_cast<std::ptrdiff_t>(worst));
    ++dropped;
  }
  if (dropped == 0) return solution;
  Solution out = make_solution(data, std::move(sel), solution.algorithm);
  out.gamma_used = solution.gamma_used;
  out.trials = solution.trials;
  out.diagnostics = solution.diagnostics;
  out.diagnostics.push_back("trimmed " + std::to_string(dropped) + " points above the quotas");
  return out;
}

Solution lp_round(const Dataset& data, const FairnessSpec& spec, const LpSearchResult& found,
                  const LpPipelineOptions& options) {
  const double gamma = found.gamma;
  const auto& x = found.fractional.x;
  Solution s;
  if (found.fractional.support.empty()) {
    // Every quota is zero; the empty set is the answer.
    s = make_solution(data, {}, options.mode == RoundingMode::Expected2 ? "lp2" : "lp6");
    s.gamma_used = gamma;
    return s;
  }
  if (options.mode == RoundingMode::Expected2) {
    Rng rng(derive_seed(options.seed, "lp2", bits_of(gamma)));
    s = round_expected_fair(data, spec, gamma, x, rng);
  } else {
    const RedistributedSolution y = redistribute_weights(data, spec, gamma, x);
    Rng rng(derive_seed(options.seed, "lp6", bits_of(gamma)));
    s = round_concentrated(data, spec, gamma, y.y, options.eps, options.delta, rng);
    if (!concentration_regime(spec, options.eps)) {
      s.diagnostics.push_back("some k_i < 3 eps^-2 ln(2m); the fairness guarantee does not apply "
                              "(greedy-flow gives exact quotas for small k_i)");
    }
  }
  return trim_to_quotas(data, spec, s);
}

Solution lp_pipeline(const Dataset& data, const FairnessSpec& spec, const LpPipelineOptions& options) {
  require_valid(data, spec);
  GuessSchedule schedule;
  if (options.grid_eps) {
    const auto range = distance_range(data);
    if (!range) throw Error("no positive pairwise distance: all points coincide");
    schedule = geometric_guesses(range->first, range->second, *options.grid_eps);
  } else {
    schedule = pairwise_guesses(data);
  }
  const auto found = lp_search(data, spec, schedule);
  if (!found) throw Error("LP infeasible at every guess");
  return lp_round(data, spec, *found, options);
}

}  // namespace fairdiv
