#pragma once

// Reference implementations used only by tests. They are written for clarity
// rather than speed and share no code with the library algorithms.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "fairdiv/core.hpp"
#include "fairdiv/random.hpp"

namespace testing {

using fairdiv::Dataset;
using fairdiv::FairnessSpec;

inline double min_gap(const Dataset& d, const std::vector<std::size_t>& s) {
  double best = fairdiv::kUnbounded;
  for (std::size_t a = 0; a < s.size(); ++a)
    for (std::size_t b = 0; b < s.size(); ++b)
      if (a != b) best = std::min(best, d.dist(s[a], s[b]));
  return best;
}

struct NaiveOpt {
  double value = -1.0;
  std::vector<std::size_t> best;
  std::vector<std::vector<std::size_t>> all_optimal;
};

/// Every subset of [n] via bitmask; keeps those meeting quotas exactly.
inline NaiveOpt naive_opt(const Dataset& d, const FairnessSpec& spec) {
  const std::size_t n = d.size();
  NaiveOpt out;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    std::vector<std::size_t> counts(d.num_groups(), 0), s;
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1) {
        s.push_back(i);
        ++counts[d.group_of(i)];
      }
    if (counts != spec.quotas) continue;
    const double v = min_gap(d, s);
    if (v > out.value) {
      out.value = v;
      out.all_optimal.clear();
    }
    if (v == out.value) out.all_optimal.push_back(s);
  }
  if (!out.all_optimal.empty()) out.best = *std::min_element(out.all_optimal.begin(), out.all_optimal.end());
  return out;
}

/// Random 1-D instance with integer-ish coordinates and mixed quotas.
inline std::pair<Dataset, FairnessSpec> random_line(std::uint64_t seed, std::size_t n, std::size_t m,
                                                    bool integer_coords = true) {
  fairdiv::Rng rng(seed);
  std::vector<fairdiv::Point> pts;
  for (std::size_t i = 0; i < n; ++i) {
    double x = integer_coords ? static_cast<double>(rng.below(60)) : rng.uniform() * 50.0;
    pts.push_back({"q" + std::to_string(i), i < m ? i : rng.below(m), {x}});
  }
  std::vector<std::string> labels;
  for (std::size_t g = 0; g < m; ++g) labels.push_back("g" + std::to_string(g));
  Dataset d = Dataset::euclidean(std::move(pts), labels);
  FairnessSpec spec;
  for (std::size_t g = 0; g < m; ++g) {
    const std::size_t size = d.group_members(g).size();
    spec.quotas.push_back(1 + rng.below(std::min<std::size_t>(size, 3)));
  }
  return {std::move(d), std::move(spec)};
}

/// Random points in [0, side]^dim with group i mod m for the first m points.
inline Dataset random_cloud(std::uint64_t seed, std::size_t n, std::size_t m, std::size_t dim, double side = 20.0) {
  fairdiv::Rng rng(seed);
  std::vector<fairdiv::Point> pts;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> x(dim);
    for (double& v : x) v = rng.uniform() * side;
    pts.push_back({"q" + std::to_string(i), i < m ? i : rng.below(m), std::move(x)});
  }
  std::vector<std::string> labels;
  for (std::size_t g = 0; g < m; ++g) labels.push_back("g" + std::to_string(g));
  return Dataset::euclidean(std::move(pts), labels);
}

/// Solves A x = b by Gaussian elimination with partial pivoting.
inline std::optional<std::vector<double>> solve_square(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    if (std::abs(a[piv][c]) < 1e-10) return std::nullopt;
    std::swap(a[c], a[piv]);
    std::swap(b[c], b[piv]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
  return x;
}

/// Feasibility of {x >= 0, group sums >= k, open-ball sums <= 1} by checking
/// every basic solution. A nonempty polyhedron inside the orthant has a
/// vertex, so this decides feasibility exactly (up to 1e-9).
inline bool lp_feasible_by_vertices(const Dataset& d, const FairnessSpec& spec, double gamma) {
  const std::size_t n = d.size();
  // Rows as (coefficients, rhs, is_ge).
  struct Row { std::vector<double> a; double b; bool ge; };
  std::vector<Row> rows;
  for (std::size_t g = 0; g < d.num_groups(); ++g) {
    Row r{std::vector<double>(n, 0.0), static_cast<double>(spec.quotas[g]), true};
    for (std::size_t i = 0; i < n; ++i)
      if (d.group_of(i) == g) r.a[i] = 1.0;
    rows.push_back(r);
  }
  for (std::size_t p = 0; p < n; ++p) {
    Row r{std::vector<double>(n, 0.0), 1.0, false};
    for (std::size_t q = 0; q < n; ++q)
      if (d.dist(p, q) < gamma / 2) r.a[q] = 1.0;
    rows.push_back(r);
  }
  for (std::size_t i = 0; i < n; ++i) {
    Row r{std::vector<double>(n, 0.0), 0.0, true};
    r.a[i] = 1.0;
    rows.push_back(r);
  }
  const std::size_t total = rows.size();
  std::vector<std::size_t> pick(n);
  for (std::size_t i = 0; i < n; ++i) pick[i] = i;
  while (true) {
    std::vector<std::vector<double>> a;
    std::vector<double> b;
    for (std::size_t i : pick) {
      a.push_back(rows[i].a);
      b.push_back(rows[i].b);
    }
    if (auto x = solve_square(a, b)) {
      bool ok = true;
      for (const Row& r : rows) {
        double lhs = 0.0;
        for (std::size_t i = 0; i < n; ++i) lhs += r.a[i] * (*x)[i];
        if (r.ge ? lhs < r.b - 1e-9 : lhs > r.b + 1e-9) ok = false;
      }
      if (ok) return true;
    }
    // Next combination of n rows out of total.
    std::size_t i = n;
    while (i > 0 && pick[i - 1] == total - n + i - 1) --i;
    if (i == 0) return false;
    ++pick[i - 1];
    for (std::size_t j = i; j < n; ++j) pick[j] = pick[j - 1] + 1;
  }
}

}  // namespace testing
