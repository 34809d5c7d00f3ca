#include <fstream>
#include <sstream>

#include "doctest.h"
#include "fairdiv/core.hpp"
#include "fairdiv/io.hpp"
#include "fairdiv/synthetic.hpp"
#include "support.hpp"

using namespace fairdiv;

namespace {

std::size_t index_of(const Dataset& d, const std::string& id) {
  for (std::size_t i = 0; i < d.size(); ++i)
    if (d.point(i).id == id) return i;
  FAIL("no point " << id);
  return 0;
}

}  // namespace

TEST_CASE("distance basics") {
  const Dataset b = fixtures::fix_b();
  CHECK(distance(b, index_of(b, "p0"), index_of(b, "p5")) == 5.0);
  for (std::size_t i = 0; i < b.size(); ++i) CHECK(distance(b, i, i) == 0.0);
  const Dataset t = fixtures::fix_tight();
  CHECK(distance(t, 0, 1) == 0.2);
  CHECK_THROWS_AS(distance(b, 0, 3), Error);
}

TEST_CASE("distance is symmetric with zero diagonal on random data") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Dataset d = testing::random_cloud(seed, 15, 3, 3);
    for (std::size_t i = 0; i < d.size(); ++i) {
      CHECK(d.distance(i, i) == 0.0);
      for (std::size_t j = 0; j < d.size(); ++j) CHECK(d.distance(i, j) == d.distance(j, i));
    }
  }
  const Dataset d = testing::random_cloud(9, 2, 1, 2);
  const auto& a = d.point(0).coords;
  const auto& c = d.point(1).coords;
  CHECK(d.distance(0, 1) == doctest::Approx(std::hypot(a[0] - c[0], a[1] - c[1])).epsilon(1e-15));
}

TEST_CASE("diversity") {
  const Dataset a = fixtures::fix_a();
  const std::vector<std::size_t> s = {index_of(a, "p0"), index_of(a, "p7"), index_of(a, "p10")};
  CHECK(diversity(a, s) == 3.0);
  const std::vector<std::size_t> one = {2};
  CHECK(diversity(a, one) == kUnbounded);
  CHECK(diversity(a, std::vector<std::size_t>{}) == kUnbounded);
  const Dataset t = fixtures::fix_tight();
  CHECK(diversity(t, std::vector<std::size_t>{0, 2, 3}) == 1.0);
}

TEST_CASE("diversity is monotone under adding and removing points") {
  const Dataset d = testing::random_cloud(4, 20, 2, 2);
  fairdiv::Rng rng(11);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < d.size(); ++i)
      if (rng.uniform() < 0.4) s.push_back(i);
    const double base = diversity(d, s);
    CHECK(base == testing::min_gap(d, s));
    auto bigger = s;
    bigger.push_back(rng.below(d.size()));
    std::sort(bigger.begin(), bigger.end());
    bigger.erase(std::unique(bigger.begin(), bigger.end()), bigger.end());
    CHECK(diversity(d, bigger) <= base);
    if (!s.empty()) {
      auto smaller = s;
      smaller.erase(smaller.begin() + static_cast<long>(rng.below(smaller.size())));
      CHECK(diversity(d, smaller) >= base);
    }
  }
}

TEST_CASE("ball membership is strict") {
  const Dataset b = fixtures::fix_b();
  CHECK(ball_members(b, 0, 1.5) == std::vector<std::size_t>{0, 1});
  CHECK(ball_members(b, 0, 1.0) == std::vector<std::size_t>{0});
  CHECK(ball_members(b, 2, 0.5) == std::vector<std::size_t>{2});
  const Dataset t = fixtures::fix_tight();
  CHECK(ball_members(t, 0, 1.0 / 3.0) == std::vector<std::size_t>{0, 1});
  CHECK(Ball{0, 0.2}.contains(t, 1) == false);
}

TEST_CASE("duplicate coordinates coexist at distance zero") {
  std::vector<Point> pts = {{"u", 0, {1.0}}, {"v", 0, {1.0}}};
  const Dataset d = Dataset::euclidean(pts, {"g"});
  CHECK(diversity(d, std::vector<std::size_t>{0, 1}) == 0.0);
  CHECK(ball_members(d, 0, 1e-12).size() == 2);
}

TEST_CASE("validation") {
  const Dataset a = fixtures::fix_a();
  CHECK(validate(a, fixtures::fix_a_spec()).issues.empty());

  const auto over = validate(a, FairnessSpec{{4, 1}});
  REQUIRE(over.has(IssueKind::QuotaExceedsGroup));
  CHECK(over.issues.front().message.find("quota exceeds group size") != std::string::npos);
  CHECK_THROWS_AS(require_valid(a, FairnessSpec{{4, 1}}), Error);
  CHECK(validate(a, FairnessSpec{{0, 0}}).has(IssueKind::EmptyQuota));
  CHECK(validate(a, FairnessSpec{{1}}).has(IssueKind::QuotaCount));

  // d(0,2) = 5 > d(0,1) + d(1,2) = 2.
  std::vector<Point> pts = {{"a", 0, {}}, {"b", 0, {}}, {"c", 0, {}}};
  const Dataset bad = Dataset::with_matrix(pts, {"g"}, {0, 1, 5, 1, 0, 1, 5, 1, 0});
  const auto report = validate(bad);
  REQUIRE(report.has(IssueKind::TriangleViolation));
  const Issue& issue = report.issues.front();
  CHECK(issue.witness == std::vector<std::size_t>{0, 1, 2});
  CHECK(issue.message.find("d(a,c)") != std::string::npos);

  const Dataset asym = Dataset::with_matrix(pts, {"g"}, {0, 1, 1, 1, 0, 1, 1, 2, 0});
  CHECK(validate(asym).has(IssueKind::Asymmetric));
  const Dataset neg = Dataset::with_matrix(pts, {"g"}, {0, -1, 1, -1, 0, 1, 1, 1, 0});
  CHECK(validate(neg).has(IssueKind::Negative));
  const Dataset diag = Dataset::with_matrix(pts, {"g"}, {1, 1, 1, 1, 0, 1, 1, 1, 0});
  CHECK(validate(diag).has(IssueKind::NonzeroDiagonal));
}

TEST_CASE("triangle check is skipped above the size limit") {
  const std::size_t n = kTriangleCheckLimit + 1;
  std::vector<Point> pts;
  for (std::size_t i = 0; i < n; ++i) pts.push_back({"p" + std::to_string(i), 0, {}});
  std::vector<double> m(n * n, 1.0);
  for (std::size_t i = 0; i < n; ++i) m[i * n + i] = 0.0;
  const Dataset d = Dataset::with_matrix(std::move(pts), {"g"}, std::move(m));
  const auto report = validate(d);
  CHECK(report.has(IssueKind::TriangleCheckSkipped));
  CHECK(report.ok());
}

TEST_CASE("mixed dimensions are rejected") {
  std::vector<Point> pts = {{"a", 0, {1.0}}, {"b", 0, {1.0, 2.0}}};
  CHECK_THROWS_AS(Dataset::euclidean(pts, {"g"}), Error);
}

TEST_CASE("subset restriction and lifting") {
  const Dataset a = fixtures::fix_a();
  const std::vector<std::size_t> keep = {1, 3, 4};
  const Subset sub = restrict_to(a, keep);
  CHECK(sub.data.size() == 3);
  CHECK(sub.data.num_groups() == 2);
  CHECK(sub.data.dist(0, 2) == a.dist(1, 4));
  Solution local = make_solution(sub.data, {0, 2}, "x");
  local.gamma_used = 2.0;
  const Solution lifted = lift_solution(a, sub, local);
  CHECK(lifted.selected == std::vector<std::size_t>{1, 4});
  CHECK(lifted.diversity == 9.0);
  CHECK(lifted.gamma_used == 2.0);

  const Dataset t = fixtures::fix_tight();
  const std::vector<std::size_t> tk = {1, 3};
  CHECK(restrict_to(t, tk).data.dist(0, 1) == 1.0);
}

TEST_CASE("solution invariants") {
  const Dataset a = fixtures::fix_a();
  const Solution s = make_solution(a, {4, 0, 3, 0}, "x");
  CHECK(s.selected == std::vector<std::size_t>{0, 3, 4});
  CHECK(s.group_counts == std::vector<std::size_t>{2, 1});
  CHECK(s.diversity == 3.0);
  CHECK(make_solution(a, {2}, "x").diversity == kUnbounded);
}

TEST_CASE("ceil_count ignores representation noise") {
  CHECK(ceil_count(0.5 * 40) == 20);
  CHECK(ceil_count((1 - 0.1) * 10) == 9);
  CHECK(ceil_count(2.0000001) == 3);
  CHECK(ceil_count(0.0) == 0);
  CHECK(ceil_count(0.5) == 1);
}

TEST_CASE("point csv round trip") {
  std::istringstream in("id,group,x1,x2\na,2,0,1\nb,10,3.5,-1\nc,2,1e3,0\n");
  const Dataset d = read_points_csv(in);
  CHECK(d.size() == 3);
  CHECK(d.dimension() == 2);
  // Integer labels sort numerically.
  CHECK(d.group_labels() == std::vector<std::string>{"2", "10"});
  CHECK(d.group_of(1) == 1);
  std::ostringstream out;
  write_points_csv(out, d);
  std::istringstream again(out.str());
  const Dataset e = read_points_csv(again);
  for (std::size_t i = 0; i < 3; ++i) CHECK(e.point(i).coords == d.point(i).coords);

  std::istringstream named("id,group,x1\na,red,0\nb,blue,1\n");
  CHECK(read_points_csv(named).group_labels() == std::vector<std::string>{"red", "blue"});
}

TEST_CASE("malformed inputs report the line") {
  std::istringstream bad_row("id,group,x1,x2\na,1,0,1\nb,1,zz,1\n");
  try {
    read_points_csv(bad_row, "f.csv");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("f.csv:3") != std::string::npos);
  }
  std::istringstream short_row("id,group,x1,x2\na,1,0\n");
  CHECK_THROWS_AS(read_points_csv(short_row), Error);
  std::istringstream no_group("id,group,x1\na,,0\n");
  CHECK_THROWS_AS(read_points_csv(no_group), Error);
  std::istringstream asym("3\na,a,a\n0,1,1\n1,0,1\n1,2,0\n");
  try {
    read_matrix(asym, "m.txt");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("cell (1,2)") != std::string::npos);
  }
}

TEST_CASE("bundled fixtures parse") {
  const Dataset t = read_dataset(std::string(FAIRDIV_FIXTURES) + "/fix_tight.txt");
  CHECK(t.size() == 4);
  CHECK(t.num_groups() == 2);
  CHECK(!t.is_euclidean());
  const Dataset ref = fixtures::fix_tight();
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(t.point(i).id == ref.point(i).id);
    CHECK(t.group_of(i) == ref.group_of(i));
    for (std::size_t j = 0; j < 4; ++j) CHECK(t.dist(i, j) == ref.dist(i, j));
  }
  const Dataset a = read_dataset(std::string(FAIRDIV_FIXTURES) + "/fix_a.csv");
  const Dataset ra = fixtures::fix_a();
  REQUIRE(a.size() == ra.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.point(i).id == ra.point(i).id);
    CHECK(a.group_of(i) == ra.group_of(i));
    CHECK(a.point(i).coords == ra.point(i).coords);
  }
  CHECK(read_dataset(std::string(FAIRDIV_FIXTURES) + "/fix_b.csv").size() == 3);
}

TEST_CASE("synthetic generation is deterministic and valid") {
  SyntheticConfig c;
  c.n = 30;
  c.m = 3;
  c.seed = 5;
  std::ostringstream a, b;
  write_points_csv(a, generate_synthetic(c));
  write_points_csv(b, generate_synthetic(c));
  CHECK(a.str() == b.str());
  c.dim = 0;
  const Dataset m = generate_synthetic(c);
  CHECK(validate(m).ok());
  std::ostringstream ma;
  write_matrix(ma, m);
  std::istringstream back(ma.str());
  const Dataset m2 = read_matrix(back);
  CHECK(m2.matrix() == m.matrix());
}
