#include <cmath>
#include <sstream>

#include "doctest.h"
#include "test_support.hpp"
#include "treesum/gaussian.hpp"

using namespace treesum;

TEST_CASE("single node matches the normal cdf") {
  Tree t = build_path(1);
  WeightSystem ws = assign(t, WeightLaw::constant(1.0), WeightLaw::constant(1.0), 2.0);
  GaussianRun run{&t, &ws, 42, 100000, {1.0}};
  SmallDevEstimate est = small_deviation(run);
  REQUIRE(est.points.size() == 1);
  double expect = std::erf(1.0 / std::sqrt(2.0));  // ~0.6827
  CHECK(est.points[0].p_hat == doctest::Approx(expect).epsilon(0.01));
  CHECK(est.points[0].ci_lo <= expect);
  CHECK(expect <= est.points[0].ci_hi);
  CHECK(est.points[0].usable);
}

TEST_CASE("sampling is deterministic and thread-layout independent") {
  Tree t = build_biased(1, 20);
  WeightSystem ws = assign(t, WeightLaw::polynomial(2.5), WeightLaw::constant(1.0), 2.0);
  GaussianRun run{&t, &ws, 7, 2000, {}};
  auto a = sample_sup(run, 1);
  auto b = sample_sup(run, 3);
  CHECK(a == b);
  auto c = sample_sup(run, 2);
  CHECK(a == c);

  GaussianRun other{&t, &ws, 8, 2000, {}};
  CHECK(sample_sup(other, 2) != a);
}

TEST_CASE("covariance closed form") {
  Tree bin = build_binary(1);
  WeightSystem ws = assign(bin, WeightLaw::constant(1.0), WeightLaw::constant(1.0), 2.0);
  CHECK(covariance(bin, ws, 0, 0) == doctest::Approx(1.0));
  CHECK(covariance(bin, ws, 1, 1) == doctest::Approx(2.0));
  CHECK(covariance(bin, ws, 1, 2) == doctest::Approx(1.0));  // shared root term

  auto checks = covariance_check(bin, ws, 11, 100000, {{1, 1}, {1, 2}});
  for (const auto& c : checks) {
    CAPTURE(c.t);
    CAPTURE(c.s);
    CHECK(c.sigmas_off <= 3.0);
  }
}

TEST_CASE("covariance agrees with simulation on random trees") {
  std::mt19937_64 rng(13);
  int failures = 0, total = 0;
  for (int i = 0; i < 6; ++i) {
    Tree t = testing::random_tree(rng, 25);
    WeightSystem ws = testing::random_weights(rng, t, 2.0);
    std::vector<std::pair<NodeId, NodeId>> pairs;
    for (int p = 0; p < 5; ++p)
      pairs.emplace_back(static_cast<NodeId>(rng() % t.node_count()),
                         static_cast<NodeId>(rng() % t.node_count()));
    for (const auto& c : covariance_check(t, ws, 1000 + i, 40000, pairs)) {
      ++total;
      if (c.sigmas_off > 3.0) ++failures;
    }
  }
  // 3-sigma misses are rare; tolerate a single one over 30 pairs
  CHECK(total == 30);
  CHECK(failures <= 1);
}

TEST_CASE("small deviation estimates") {
  Tree t = build_biased(1, 30);
  WeightSystem ws = assign(t, WeightLaw::polynomial(2.5), WeightLaw::constant(1.0), 2.0);
  std::vector<double> grid;
  for (double e = 2.0; e > 0.3; e *= 0.8) grid.push_back(e);
  GaussianRun run{&t, &ws, 5, 20000, grid};
  SmallDevEstimate est = small_deviation(run);
  for (std::size_t i = 1; i < est.points.size(); ++i)
    CHECK(est.points[i].p_hat <= est.points[i - 1].p_hat);
  for (const auto& pt : est.points)
    if (pt.successes == 0) CHECK(!pt.usable);

  std::ostringstream csv;
  write_small_deviation_csv(est, csv);
  CHECK(csv.str().find("epsilon,p_hat,ci_lo,ci_hi,minus_log_p,flag") == 0);

  // q != 2 is refused
  WeightSystem w3 = assign(t, WeightLaw::polynomial(2.5), WeightLaw::constant(1.0), 3.0);
  GaussianRun bad{&t, &w3, 5, 100, grid};
  CHECK_THROWS_WITH(small_deviation(bad), doctest::Contains("q = 2"));
}
