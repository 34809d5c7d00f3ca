#include "doctest.h"
#include "fairdiv/oracle.hpp"
#include "support.hpp"

using namespace fairdiv;

TEST_CASE("fixture optima") {
  const Dataset a = fixtures::fix_a();
  const Solution s = brute_force_opt(a, fixtures::fix_a_spec());
  CHECK(s.diversity == 3.0);
  CHECK(s.group_counts == std::vector<std::size_t>{2, 1});
  const auto naive = testing::naive_opt(a, fixtures::fix_a_spec());
  CHECK(naive.value == 3.0);
  CHECK(naive.all_optimal.size() == 4);
  CHECK(s.selected == naive.best);
  // {0, 7, 10} is one of the tied optima.
  const std::vector<std::size_t> listed_set = {0, 3, 4};
  CHECK(std::find(naive.all_optimal.begin(), naive.all_optimal.end(), listed_set) != naive.all_optimal.end());

  const Solution t = brute_force_opt(fixtures::fix_tight(), fixtures::fix_tight_spec());
  CHECK(t.diversity == 1.0);
  CHECK(t.selected == std::vector<std::size_t>{0, 2, 3});

  CHECK(brute_force_opt(fixtures::fix_b(), fixtures::fix_b_spec()).diversity == 5.0);
}

TEST_CASE("k = n forces the whole set") {
  const Dataset d = testing::random_cloud(3, 7, 1, 2);
  const Solution s = brute_force_opt(d, FairnessSpec{{7}});
  CHECK(s.selected.size() == 7);
  CHECK(s.diversity == testing::min_gap(d, s.selected));
}

TEST_CASE("branch and bound matches naive enumeration") {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    const std::size_t m = 1 + seed % 3;
    const Dataset d = seed % 2 ? testing::random_cloud(seed, 11, m, 2) : testing::random_line(seed, 11, m).first;
    FairnessSpec spec;
    for (std::size_t g = 0; g < m; ++g) spec.quotas.push_back(1 + (seed + g) % std::min<std::size_t>(3, d.group_members(g).size()));
    const auto naive = testing::naive_opt(d, spec);
    const Solution s = brute_force_opt(d, spec);
    CHECK(s.diversity == naive.value);
    CHECK(s.selected == naive.best);
  }
}

TEST_CASE("scaling distances scales the optimum") {
  const Dataset d = testing::random_cloud(21, 10, 2, 2);
  std::vector<Point> scaled;
  for (const Point& p : d.points()) {
    Point q = p;
    for (double& c : q.coords) c *= 4.0;  // power of two keeps arithmetic exact
    scaled.push_back(q);
  }
  const Dataset e = Dataset::euclidean(scaled, d.group_labels());
  const FairnessSpec spec{{2, 2}};
  CHECK(brute_force_opt(e, spec).diversity == 4.0 * brute_force_opt(d, spec).diversity);
}

TEST_CASE("budget and infeasibility errors") {
  const Dataset d = testing::random_cloud(2, 40, 1, 2);
  CHECK(candidate_count(d, FairnessSpec{{20}}) > 1e11);
  CHECK_THROWS_AS(brute_force_opt(d, FairnessSpec{{20}}), Error);
  CHECK_THROWS_AS(brute_force_opt(d, FairnessSpec{{3}}, 100.0), Error);
  CHECK_THROWS_AS(brute_force_opt(fixtures::fix_a(), FairnessSpec{{4, 1}}), Error);
}

TEST_CASE("verify") {
  const Dataset a = fixtures::fix_a();
  const FairnessSpec spec = fixtures::fix_a_spec();
  // x = 0, 4, 7
  CHECK(verify(a, spec, make_solution(a, {0, 2, 3}, "t"), 1.0, 1.0).pass);
  // x = 0, 1, 4: div 1 < 3/2
  const Verdict v = verify(a, spec, make_solution(a, {0, 1, 2}, "t"), 2.0, 1.0);
  CHECK_FALSE(v.pass);
  CHECK_FALSE(v.diversity_ok);
  CHECK(v.fairness_ok);
  CHECK(v.required_diversity == 1.5);
  // Missing the group-b point.
  const Verdict w = verify(a, spec, make_solution(a, {0, 4}, "t"), 1.0, 1.0);
  CHECK_FALSE(w.fairness_ok);
  CHECK_FALSE(w.pass);
  // beta = 0.5 relaxes k_a = 2 to 1.
  CHECK(verify(a, spec, make_solution(a, {0, 3}, "t"), 1.0, 0.5).fairness_ok);
  CHECK_THROWS_AS(verify(a, spec, make_solution(a, {0}, "t"), 0.5, 1.0), Error);
}
