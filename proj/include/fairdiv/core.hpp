#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fairdiv {

/// Raised for malformed inputs and violated preconditions.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Diversity of a set with fewer than two points.
inline constexpr double kUnbounded = std::numeric_limits<double>::infinity();

struct Point {
  std::string id;
  std::size_t group = 0;       // zero-based index into Dataset::group_labels()
  std::vector<double> coords;  // empty in matrix mode
};

enum class MetricKind { Euclidean, Matrix };

/// Points partitioned into groups, plus the metric over them.
///
/// Either every point carries coordinates of a common dimension (Euclidean
/// mode) or the metric is an explicit symmetric n x n matrix. Instances are
/// immutable after construction.
class Dataset {
 public:
  Dataset() = default;

  static Dataset euclidean(std::vector<Point> points, std::vector<std::string> group_labels);
  static Dataset with_matrix(std::vector<Point> points, std::vector<std::string> group_labels,
                             std::vector<double> matrix);

  std::size_t size() const { return points_.size(); }
  std::size_t num_groups() const { return labels_.size(); }
  MetricKind metric() const { return kind_; }
  bool is_euclidean() const { return kind_ == MetricKind::Euclidean; }
  std::size_t dimension() const { return dim_; }

  const Point& point(std::size_t i) const { return points_.at(i); }
  const std::vector<Point>& points() const { return points_; }
  std::size_t group_of(std::size_t i) const { return points_[i].group; }
  const std::vector<std::string>& group_labels() const { return labels_; }
  const std::vector<std::size_t>& group_members(std::size_t g) const { return members_.at(g); }
  const std::vector<double>& matrix() const { return matrix_; }

  /// Checked distance; throws Error on out-of-range indices.
  double distance(std::size_t i, std::size_t j) const;

  /// Unchecked distance used in inner loops.
  double dist(std::size_t i, std::size_t j) const {
    if (kind_ == MetricKind::Matrix) return matrix_[i * points_.size() + j];
    return euclid(i, j);
  }

  /// Index of the group with the given label, if any.
  std::optional<std::size_t> find_group(const std::string& label) const;

 private:
  double euclid(std::size_t i, std::size_t j) const;
  void index_groups();

  std::vector<Point> points_;
  std::vector<std::string> labels_;
  std::vector<std::vector<std::size_t>> members_;
  std::vector<double> matrix_;
  MetricKind kind_ = MetricKind::Euclidean;
  std::size_t dim_ = 0;
};

/// A restriction of a dataset to some of its points, remembering where each
/// point came from. Group labels (and thus group indices) are preserved.
struct Subset {
  Dataset data;
  std::vector<std::size_t> parent_index;
};

Subset restrict_to(const Dataset& parent, std::span<const std::size_t> indices);

/// Per-group quotas k_1..k_m.
struct FairnessSpec {
  std::vector<std::size_t> quotas;

  std::size_t total() const;
  std::size_t groups() const { return quotas.size(); }
};

/// Open ball: q is a member iff d(center, q) < radius.
struct Ball {
  std::size_t center = 0;
  double radius = 0.0;

  bool contains(const Dataset& data, std::size_t q) const { return data.dist(center, q) < radius; }
};

struct Solution {
  std::vector<std::size_t> selected;  // ascending point indices
  double diversity = kUnbounded;
  std::vector<std::size_t> group_counts;
  std::optional<double> gamma_used;
  std::size_t trials = 0;
  std::string algorithm;
  std::vector<std::string> diagnostics;
};

/// Builds a solution for `selected`, recomputing diversity and group counts.
Solution make_solution(const Dataset& data, std::vector<std::size_t> selected, std::string algorithm);

/// Maps a solution computed on a subset back to the parent's indices.
Solution lift_solution(const Dataset& parent, const Subset& subset, const Solution& local);

/// Disjoint clusters of point indices, in construction order.
struct ClusterFamily {
  std::vector<std::vector<std::size_t>> clusters;

  std::size_t size() const { return clusters.size(); }
};

double distance(const Dataset& data, std::size_t i, std::size_t j);

/// Minimum pairwise distance over unordered pairs; kUnbounded for |subset| <= 1.
double diversity(const Dataset& data, std::span<const std::size_t> subset);

/// Every point at distance strictly less than `radius` from `center`.
std::vector<std::size_t> ball_members(const Dataset& data, std::size_t center, double radius);

std::vector<std::size_t> group_counts(const Dataset& data, std::span<const std::size_t> subset);

/// ceil(x) that ignores representation noise just above an integer.
std::size_t ceil_count(double x);

enum class IssueKind {
  QuotaCount,
  QuotaExceedsGroup,
  EmptyQuota,
  EmptyGroup,
  DimensionMismatch,
  Asymmetric,
  NonzeroDiagonal,
  Negative,
  NotFinite,
  TriangleViolation,
  TriangleCheckSkipped,
};

struct Issue {
  IssueKind kind;
  std::string message;
  std::vector<std::size_t> witness;  // offending point indices, if any
};

struct ValidationReport {
  std::vector<Issue> issues;

  /// True when nothing but informational warnings were recorded.
  bool ok() const;
  bool has(IssueKind kind) const;
};

inline constexpr std::size_t kTriangleCheckLimit = 2000;
inline constexpr double kMetricTolerance = 1e-9;

ValidationReport validate(const Dataset& data);
ValidationReport validate(const Dataset& data, const FairnessSpec& spec);

/// Throws Error listing the first blocking issue, if any.
void require_valid(const Dataset& data, const FairnessSpec& spec);

namespace fixtures {

/// 1-D, group a = {0, 4, 10}, group b = {1, 7}; points in ascending order.
Dataset fix_a();
FairnessSpec fix_a_spec();  // k_a = 2, k_b = 1

/// 1-D single group {0, 1, 5}.
Dataset fix_b();
FairnessSpec fix_b_spec();  // k = 2

/// Four points: p1 white; p2, p3, p4 black. d(p1, p2) = 0.2, all others 1.
Dataset fix_tight();
FairnessSpec fix_tight_spec();  // 1 white, 2 black

}  // namespace fixtures

}  // namespace fairdiv
