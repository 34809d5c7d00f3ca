#include "fairdiv/oracle.hpp"

#include <algorithm>
#include <cmath>

namespace fairdiv {

namespace {

double binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return std::round(r);
}

class Search {
 public:
  Search(const Dataset& data, const FairnessSpec& spec) : data_(data), spec_(spec), n_(data.size()) {
    dist_.resize(n_ * n_);
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) dist_[i * n_ + j] = data.dist(i, j);
    }
    for (std::size_t g = 0; g < spec.groups(); ++g) {
      if (spec.quotas[g] > 0) order_.push_back(g);
    }
  }

  void run() {
    chosen_.clear();
    descend(0, 0, 0, kUnbounded);
  }

  bool found() const { return found_; }
  double best() const { return best_; }
  const std::vector<std::size_t>& best_set() const { return best_set_; }

 private:
  // Picks the remaining points of group order_[slot], members from position `from`.
  void descend(std::size_t slot, std::size_t picked, std::size_t from, double running) {
    if (found_ && running < best_) return;
    if (slot == order_.size()) {
      std::vector<std::size_t> s = chosen_;
      std::sort(s.begin(), s.end());
      if (!found_ || running > best_ || s < best_set_) {
        found_ = true;
        best_ = running;
        best_set_ = std::move(s);
      }
      return;
    }
    const std::size_t g = order_[slot];
    const auto& members = data_.group_members(g);
    const std::size_t need = spec_.quotas[g];
    if (picked == need) {
      descend(slot + 1, 0, 0, running);
      return;
    }
    for (std::size_t pos = from; pos + (need - picked) <= members.size(); ++pos) {
      const std::size_t p = members[pos];
      double r = running;
      const double* row = &dist_[p * n_];
      for (std::size_t q : chosen_) r = std::min(r, row[q]);
      if (found_ && r < best_) continue;
      chosen_.push_back(p);
      descend(slot, picked + 1, pos + 1, r);
      chosen_.pop_back();
    }
  }

  const Dataset& data_;
  const FairnessSpec& spec_;
  std::size_t n_;
  std::vector<double> dist_;
  std::vector<std::size_t> order_;
  std::vector<std::size_t> chosen_;
  bool found_ = false;
  double best_ = -1.0;
  std::vector<std::size_t> best_set_;
};

}  // namespace

double candidate_count(const Dataset& data, const FairnessSpec& spec) {
  double total = 1.0;
  for (std::size_t g = 0; g < spec.groups() && g < data.num_groups(); ++g) {
    total *= binomial(data.group_members(g).size(), spec.quotas[g]);
  }
  return total;
}

Solution brute_force_opt(const Dataset& data, const FairnessSpec& spec, double budget) {
  require_valid(data, spec);
  const double count = candidate_count(data, spec);
  if (count > budget) {
    throw Error("oracle budget exceeded: " + std::to_string(count) + " candidate subsets > " +
                std::to_string(budget));
  }
  Search search(data, spec);
  search.run();
  if (!search.found()) throw Error("quotas are infeasible");
  Solution s = make_solution(data, search.best_set(), "brute");
  return s;
}

Verdict verify_against(const Dataset& data, const FairnessSpec& spec, const Solution& solution, double alpha,
                       double beta, double optimum) {
  if (!(alpha >= 1.0)) throw Error("alpha must be >= 1");
  if (!(beta > 0.0 && beta <= 1.0)) throw Error("beta must lie in (0, 1]");
  Verdict v;
  v.optimum = optimum;
  v.required_diversity = optimum / alpha;
  const double div = diversity(data, solution.selected);
  v.diversity_ok = div >= v.required_diversity;
  const auto counts = group_counts(data, solution.selected);
  v.fairness_ok = counts.size() == spec.groups();
  for (std::size_t g = 0; g < spec.groups(); ++g) {
    v.required_counts.push_back(ceil_count(beta * static_cast<double>(spec.quotas[g])));
    if (g < counts.size() && counts[g] < v.required_counts.back()) v.fairness_ok = false;
  }
  v.pass = v.diversity_ok && v.fairness_ok;
  return v;
}

Verdict verify(const Dataset& data, const FairnessSpec& spec, const Solution& solution, double alpha, double beta,
               double budget) {
  const Solution opt = brute_force_opt(data, spec, budget);
  return verify_against(data, spec, solution, alpha, beta, opt.diversity);
}

}  // namespace fairdiv
