#pragma once

#include "fairdiv/core.hpp"

namespace fairdiv {

inline constexpr double kDefaultOracleBudget = 5e7;

/// Number of quota-exact subsets, prod_i C(|X_i|, k_i), as a double.
double candidate_count(const Dataset& data, const FairnessSpec& spec);

/// Exact optimum by branch and bound over per-group combinations.
///
/// Ties go to the lexicographically smallest sorted index set. Throws when
/// the candidate count exceeds `budget` or the quotas are infeasible.
Solution brute_force_opt(const Dataset& data, const FairnessSpec& spec, double budget = kDefaultOracleBudget);

struct Verdict {
  bool pass = false;
  bool diversity_ok = false;
  bool fairness_ok = false;
  double optimum = 0.0;  // ℓ* from the oracle
  double required_diversity = 0.0;
  std::vector<std::size_t> required_counts;
};

/// div(S) >= ℓ*/alpha and |S ∩ X_i| >= ceil(beta k_i) for every group.
Verdict verify(const Dataset& data, const FairnessSpec& spec, const Solution& solution, double alpha,
               double beta, double budget = kDefaultOracleBudget);

/// Same check against an already known optimum.
Verdict verify_against(const Dataset& data, const FairnessSpec& spec, const Solution& solution, double alpha,
                       double beta, double optimum);

}  // namespace fairdiv
