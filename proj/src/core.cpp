#include "fairdiv/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace fairdiv {

Dataset Dataset::euclidean(std::vector<Point> points, std::vector<std::string> group_labels) {
  Dataset d;
  d.kind_ = MetricKind::Euclidean;
  d.points_ = std::move(points);
  d.labels_ = std::move(group_labels);
  d.dim_ = d.points_.empty() ? 0 : d.points_.front().coords.size();
  for (std::size_t i = 0; i < d.points_.size(); ++i) {
    if (d.points_[i].coords.size() != d.dim_) {
      throw Error("point " + d.points_[i].id + " has dimension " +
                  std::to_string(d.points_[i].coords.size()) + ", expected " + std::to_string(d.dim_));
    }
  }
  if (!d.points_.empty() && d.dim_ == 0) throw Error("Euclidean points need at least one coordinate");
  d.index_groups();
  return d;
}

Dataset Dataset::with_matrix(std::vector<Point> points, std::vector<std::string> group_labels,
                             std::vector<double> matrix) {
  Dataset d;
  d.kind_ = MetricKind::Matrix;
  d.points_ = std::move(points);
  d.labels_ = std::move(group_labels);
  const std::size_t n = d.points_.size();
  if (matrix.size() != n * n) {
    throw Error("distance matrix has " + std::to_string(matrix.size()) + " entries, expected " +
                std::to_string(n * n));
  }
  d.matrix_ = std::move(matrix);
  d.index_groups();
  return d;
}

void Dataset::index_groups() {
  members_.assign(labels_.size(), {});
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const std::size_t g = points_[i].group;
    if (g >= labels_.size()) {
      throw Error("point " + points_[i].id + " has group index " + std::to_string(g) + " but only " +
                  std::to_string(labels_.size()) + " groups exist");
    }
    members_[g].push_back(i);
  }
}

double Dataset::euclid(std::size_t i, std::size_t j) const {
  const auto& a = points_[i].coords;
  const auto& b = points_[j].coords;
  double sum = 0.0;
  for (std::size_t d = 0; d < dim_; ++d) {
    const double diff = a[d] - b[d];
    sum += diff * diff;
  }
  return std::sqrt(sum);
}

double Dataset::distance(std::size_t i, std::size_t j) const {
  if (i >= points_.size() || j >= points_.size()) {
    throw Error("point index out of range: (" + std::to_string(i) + ", " + std::to_string(j) +
                ") with n = " + std::to_string(points_.size()));
  }
  return dist(i, j);
}

std::optional<std::size_t> Dataset::find_group(const std::string& label) const {
  for (std::size_t g = 0; g < labels_.size(); ++g) {
    if (labels_[g] == label) return g;
  }
  return std::nullopt;
}

Subset restrict_to(const Dataset& parent, std::span<const std::size_t> indices) {
  Subset out;
  out.parent_index.assign(indices.begin(), indices.end());
  std::vector<Point> pts;
  pts.reserve(indices.size());
  for (std::size_t i : indices) pts.push_back(parent.point(i));
  if (parent.is_euclidean()) {
    out.data = Dataset::euclidean(std::move(pts), parent.group_labels());
  } else {
    const std::size_t n = indices.size();
    std::vector<double> m(n * n);
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) m[a * n + b] = parent.dist(indices[a], indices[b]);
    }
    out.data = Dataset::with_matrix(std::move(pts), parent.group_labels(), std::move(m));
  }
  return out;
}

std::size_t FairnessSpec::total() const { return std::accumulate(quotas.begin(), quotas.end(), std::size_t{0}); }

Solution make_solution(const Dataset& data, std::vector<std::size_t> selected, std::string algorithm) {
  std::sort(selected.begin(), selected.end());
  selected.erase(std::unique(selected.begin(), selected.end()), selected.end());
  Solution s;
  s.diversity = diversity(data, selected);
  s.group_counts = group_counts(data, selected);
  s.selected = std::move(selected);
  s.algorithm = std::move(algorithm);
  return s;
}

Solution lift_solution(const Dataset& parent, const Subset& subset, const Solution& local) {
  std::vector<std::size_t> sel;
  sel.reserve(local.selected.size());
  for (std::size_t i : local.selected) sel.push_back(subset.parent_index.at(i));
  Solution out = make_solution(parent, std::move(sel), local.algorithm);
  out.gamma_used = local.gamma_used;
  out.trials = local.trials;
  out.diagnostics = local.diagnostics;
  return out;
}

double distance(const Dataset& data, std::size_t i, std::size_t j) { return data.distance(i, j); }

double diversity(const Dataset& data, std::span<const std::size_t> subset) {
  double best = kUnbounded;
  for (std::size_t a = 0; a < subset.size(); ++a) {
    for (std::size_t b = a + 1; b < subset.size(); ++b) {
      best = std::min(best, data.dist(subset[a], subset[b]));
    }
  }
  return best;
}

std::vector<std::size_t> ball_members(const Dataset& data, std::size_t center, double radius) {
  std::vector<std::size_t> out;
  for (std::size_t q = 0; q < data.size(); ++q) {
    if (data.dist(center, q) < radius) out.push_back(q);
  }
  return out;
}

std::vector<std::size_t> group_counts(const Dataset& data, std::span<const std::size_t> subset) {
  std::vector<std::size_t> counts(data.num_groups(), 0);
  for (std::size_t i : subset) ++counts[data.group_of(i)];
  return counts;
}

std::size_t ceil_count(double x) {
  if (!(x > 0.0)) return 0;
  const double r = std::round(x);
  if (std::abs(x - r) <= 1e-9 * std::max(1.0, std::abs(x))) return static_cast<std::size_t>(r);
  return static_cast<std::size_t>(std::ceil(x));
}

bool ValidationReport::ok() const {
  return std::all_of(issues.begin(), issues.end(),
                     [](const Issue& i) { return i.kind == IssueKind::TriangleCheckSkipped; });
}

bool ValidationReport::has(IssueKind kind) const {
  return std::any_of(issues.begin(), issues.end(), [&](const Issue& i) { return i.kind == kind; });
}

namespace {

void validate_matrix(const Dataset& data, ValidationReport& report) {
  const std::size_t n = data.size();
  const auto& id = [&](std::size_t i) -> const std::string& { return data.point(i).id; };
  for (std::size_t i = 0; i < n; ++i) {
    const double dii = data.dist(i, i);
    if (dii != 0.0) {
      report.issues.push_back({IssueKind::NonzeroDiagonal, "d(" + id(i) + "," + id(i) + ") is not zero", {i}});
    }
    for (std::size_t j = 0; j < n; ++j) {
      const double v = data.dist(i, j);
      if (!std::isfinite(v)) {
        report.issues.push_back({IssueKind::NotFinite, "d(" + id(i) + "," + id(j) + ") is not finite", {i, j}});
      } else if (v < 0.0) {
        report.issues.push_back({IssueKind::Negative, "d(" + id(i) + "," + id(j) + ") is negative", {i, j}});
      }
      if (j > i && v != data.dist(j, i)) {
        std::ostringstream msg;
        msg << "metric asymmetry at cell (" << i << "," << j << "): d(" << id(i) << "," << id(j) << ") = " << v
            << " but d(" << id(j) << "," << id(i) << ") = " << data.dist(j, i);
        report.issues.push_back({IssueKind::Asymmetric, msg.str(), {i, j}});
      }
    }
  }
  if (n > kTriangleCheckLimit) {
    report.issues.push_back({IssueKind::TriangleCheckSkipped,
                             "triangle inequality not checked for n = " + std::to_string(n) + " > " +
                                 std::to_string(kTriangleCheckLimit),
                             {}});
    return;
  }
  constexpr std::size_t kMaxWitnesses = 10;
  std::size_t found = 0;
  for (std::size_t a = 0; a < n && found < kMaxWitnesses; ++a) {
    for (std::size_t b = 0; b < n && found < kMaxWitnesses; ++b) {
      const double ab = data.dist(a, b);
      for (std::size_t c = 0; c < n; ++c) {
        if (data.dist(a, c) > ab + data.dist(b, c) + kMetricTolerance) {
          std::ostringstream msg;
          msg << "triangle inequality violated: d(" << id(a) << "," << id(c) << ") = " << data.dist(a, c)
              << " > d(" << id(a) << "," << id(b) << ") + d(" << id(b) << "," << id(c) << ") = "
              << ab + data.dist(b, c);
          report.issues.push_back({IssueKind::TriangleViolation, msg.str(), {a, b, c}});
          if (++found >= kMaxWitnesses) break;
        }
      }
    }
  }
}

}  // namespace

ValidationReport validate(const Dataset& data) {
  ValidationReport report;
  for (std::size_t g = 0; g < data.num_groups(); ++g) {
    if (data.group_members(g).empty()) {
      report.issues.push_back({IssueKind::EmptyGroup, "group " + data.group_labels()[g] + " has no points", {}});
    }
  }
  if (data.is_euclidean()) {
    for (std::size_t i = 0; i < data.size(); ++i) {
      for (double c : data.point(i).coords) {
        if (!std::isfinite(c)) {
          report.issues.push_back({IssueKind::NotFinite, "point " + data.point(i).id + " has a non-finite coordinate", {i}});
          break;
        }
      }
    }
  } else {
    validate_matrix(data, report);
  }
  return report;
}

ValidationReport validate(const Dataset& data, const FairnessSpec& spec) {
  ValidationReport report = validate(data);
  // An empty group is only a problem when a quota references it.
  std::erase_if(report.issues, [](const Issue& i) { return i.kind == IssueKind::EmptyGroup; });
  if (spec.quotas.size() != data.num_groups()) {
    report.issues.push_back({IssueKind::QuotaCount,
                             "expected " + std::to_string(data.num_groups()) + " quotas, got " +
                                 std::to_string(spec.quotas.size()),
                             {}});
    return report;
  }
  for (std::size_t g = 0; g < spec.quotas.size(); ++g) {
    const std::size_t have = data.group_members(g).size();
    if (spec.quotas[g] > have) {
      report.issues.push_back({IssueKind::QuotaExceedsGroup,
                               "quota exceeds group size for group " + data.group_labels()[g] + ": k = " +
                                   std::to_string(spec.quotas[g]) + " > " + std::to_string(have),
                               {}});
    }
  }
  if (spec.total() == 0) report.issues.push_back({IssueKind::EmptyQuota, "total quota k must be at least 1", {}});
  return report;
}

void require_valid(const Dataset& data, const FairnessSpec& spec) {
  const ValidationReport report = validate(data, spec);
  for (const Issue& issue : report.issues) {
    if (issue.kind != IssueKind::TriangleCheckSkipped) throw Error(issue.message);
  }
}

namespace fixtures {

namespace {

Dataset line(const std::vector<std::pair<double, std::size_t>>& xs, std::vector<std::string> labels) {
  std::vector<Point> pts;
  for (const auto& [x, g] : xs) pts.push_back({"p" + std::to_string(static_cast<long>(x)), g, {x}});
  return Dataset::euclidean(std::move(pts), std::move(labels));
}

}  // namespace

Dataset fix_a() { return line({{0.0, 0}, {1.0, 1}, {4.0, 0}, {7.0, 1}, {10.0, 0}}, {"a", "b"}); }
FairnessSpec fix_a_spec() { return {{2, 1}}; }

Dataset fix_b() { return line({{0.0, 0}, {1.0, 0}, {5.0, 0}}, {"g"}); }
FairnessSpec fix_b_spec() { return {{2}}; }

Dataset fix_tight() {
  std::vector<Point> pts = {{"p1", 0, {}}, {"p2", 1, {}}, {"p3", 1, {}}, {"p4", 1, {}}};
  std::vector<double> m(16, 1.0);
  for (std::size_t i = 0; i < 4; ++i) m[i * 4 + i] = 0.0;
  m[0 * 4 + 1] = m[1 * 4 + 0] = 0.2;
  return Dataset::with_matrix(std::move(pts), {"white", "black"}, std::move(m));
}
FairnessSpec fix_tight_spec() { return {{1, 2}}; }

}  // namespace fixtures

}  // namespace fairdiv
