#include <cmath>
#include <sstream>

#include "doctest.h"
#include "test_support.hpp"
#include "treesum/weights.hpp"

using namespace treesum;

TEST_CASE("weight laws") {
  Tree p = build_path(3);
  WeightSystem ws = assign(p, WeightLaw::constant(1.0), WeightLaw::constant(1.0), 2.0);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(ws.alpha[i] == 1.0);
    CHECK(ws.sigma_at(static_cast<NodeId>(i)) == 1.0);
  }

  // polynomial gamma=2, q=2 evaluates to max(1,depth)^-1
  WeightSystem wp = assign(p, WeightLaw::polynomial(2.0), WeightLaw::constant(1.0), 2.0);
  CHECK(wp.alpha[0] == doctest::Approx(1.0));
  CHECK(wp.alpha[1] == doctest::Approx(1.0));
  CHECK(wp.alpha[2] == doctest::Approx(0.5));

  // a per-node sigma that grows along an edge is rejected with the edge named
  CHECK_THROWS_WITH(
      assign(p, WeightLaw::constant(1.0), WeightLaw::per_node({1.0, 0.5, 0.7}), 2.0),
      doctest::Contains("(1 -> 2)"));

  CHECK_THROWS(assign(p, WeightLaw::constant(1.0), WeightLaw::constant(1.0), 0.5));
}

TEST_CASE("boundedness statistic") {
  Tree p = build_path(3);
  WeightSystem unit = assign(p, WeightLaw::constant(1.0), WeightLaw::constant(1.0), 1.0);
  CHECK(boundedness_statistic(unit) == doctest::Approx(3.0));

  Tree single = build_path(1);
  WeightSystem s = assign(single, WeightLaw::constant(0.7), WeightLaw::constant(1.3), 2.0);
  CHECK(boundedness_statistic(s) == doctest::Approx(0.7 * 1.3));

  WeightSystem w = assign_values(p, {1, 1, 1}, {1, 1, 0.5}, 1.0);
  CHECK(boundedness_statistic(w) == doctest::Approx(2.0));  // max(1, 2, 3*0.5)
  CHECK(w.bound_stat == doctest::Approx(2.0));
}

TEST_CASE("boundedness statistic is monotone in the weights") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 30; ++i) {
    Tree t = testing::random_tree(rng, 30);
    WeightSystem ws = testing::random_weights(rng, t, testing::pick_q(rng));
    double base = boundedness_statistic(ws);
    std::vector<double> alpha_up = ws.alpha;
    for (auto& a : alpha_up) a *= 1.1;
    std::vector<double> sigma(ws.sigma.size());
    for (std::size_t j = 0; j < sigma.size(); ++j) sigma[j] = ws.sigma_at(static_cast<NodeId>(j));
    WeightSystem up = assign_values(t, alpha_up, sigma, ws.q);
    CHECK(boundedness_statistic(up) >= base);
    std::vector<double> sigma_up = sigma;
    for (auto& s : sigma_up) s *= 1.3;
    WeightSystem up2 = assign_values(t, ws.alpha, sigma_up, ws.q);
    CHECK(boundedness_statistic(up2) >= base * (1 - 1e-12));
  }
}

TEST_CASE("boundedness criterion on the half line") {
  Tree p = build_path(2000);
  std::vector<double> sigma(2000);
  for (int i = 0; i < 2000; ++i) sigma[static_cast<std::size_t>(i)] = 1.0 / (1.0 + i);
  WeightSystem ws = assign(p, WeightLaw::constant(1.0), WeightLaw::per_node(sigma), 2.0);
  // (v+1)^(1/2) / (1+v) peaks at v = 0
  CHECK(mazya_rosin_statistic(ws, 1.0) == doctest::Approx(1.0));

  // p = 1 collapses to the boundedness statistic on any path instance
  std::mt19937_64 rng(5);
  for (int i = 0; i < 10; ++i) {
    Tree path = build_path(2 + static_cast<int>(rng() % 60));
    WeightSystem w = testing::random_weights(rng, path, testing::pick_q(rng));
    CHECK(mazya_rosin_statistic(w, 1.0) == boundedness_statistic(w));
  }

  Tree single = build_path(1);
  WeightSystem s = assign(single, WeightLaw::constant(0.8), WeightLaw::constant(1.1), 2.0);
  CHECK(mazya_rosin_statistic(s, 2.0) == doctest::Approx(0.8 * 1.1));

  Tree bin = build_binary(2);
  WeightSystem wb = assign(bin, WeightLaw::constant(1.0), WeightLaw::constant(1.0), 2.0);
  CHECK_THROWS(mazya_rosin_statistic(wb, 1.0));
  CHECK_THROWS(mazya_rosin_statistic(ws, 3.0));  // p > q
}

TEST_CASE("dyadic rounding") {
  Tree p = build_path(4);
  WeightSystem ws = assign_values(p, {1, 1, 1, 1}, {1.0, 0.7, 0.5, 0.3}, 2.0);
  auto r = dyadic_round(ws);
  CHECK(r.sigma_hat == std::vector<double>{1.0, 1.0, 0.5, 0.5});
  CHECK(r.level_of == std::vector<int>{0, 0, 1, 1});

  WeightSystem ones = assign(p, WeightLaw::constant(1.0), WeightLaw::constant(1.0), 2.0);
  auto r1 = dyadic_round(ones);
  for (double s : r1.sigma_hat) CHECK(s == 1.0);
  for (int m : r1.level_of) CHECK(m == 0);

  // exact powers of two are fixed points
  WeightSystem pw = assign_values(p, {1, 1, 1, 1}, {1.0, 0.5, 0.25, 0.125}, 2.0);
  auto r2 = dyadic_round(pw);
  CHECK(r2.sigma_hat == std::vector<double>{1.0, 0.5, 0.25, 0.125});
  CHECK(r2.level_of == std::vector<int>{0, 1, 2, 3});
}

TEST_CASE("dyadic rounding brackets sigma exactly") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 60; ++i) {
    Tree t = testing::random_tree(rng, 60);
    WeightSystem ws = testing::random_weights(rng, t, testing::pick_q(rng));
    auto r = dyadic_round(ws);
    for (std::size_t j = 0; j < ws.sigma.size(); ++j) {
      CHECK(ws.sigma[j] <= r.sigma_hat[j]);
      CHECK(r.sigma_hat[j] <= 2.0 * ws.sigma[j]);
    }
    // band index never decreases along an edge
    for (std::size_t j = 1; j < ws.sigma.size(); ++j) {
      auto parent = static_cast<std::size_t>(t.parent(static_cast<NodeId>(j)));
      CHECK(r.level_of[j] >= r.level_of[parent]);
    }
  }
}

TEST_CASE("weight table csv") {
  Tree p = build_path(3);
  std::stringstream csv("node_index,alpha,sigma\n0,1.0,2.0\n1,0.5,1.0\n2,0.25,0.5\n");
  auto [alpha_law, sigma_law] = load_weight_table(csv, p.node_count());
  WeightSystem ws = assign(p, alpha_law, sigma_law, 2.0);
  CHECK(ws.alpha[2] == doctest::Approx(0.25));
  CHECK(ws.sigma_scale == doctest::Approx(2.0));
  CHECK(ws.sigma_at(2) == doctest::Approx(0.5));

  std::stringstream missing("0,1,1\n2,1,1\n");
  CHECK_THROWS_WITH(load_weight_table(missing, 3), doctest::Contains("missing node 1"));
}
