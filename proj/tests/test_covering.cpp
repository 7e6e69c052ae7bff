#include <cmath>

#include "doctest.h"
#include "json.hpp"
#include "test_support.hpp"
#include "treesum/covering.hpp"

using namespace treesum;

namespace {

struct Path3 {
  Tree tree = build_path(3);
  WeightSystem ws = assign(tree, WeightLaw::constant(1.0), WeightLaw::constant(1.0), 1.0);
  MetricEvaluator me{tree, ws};
};

}  // namespace

TEST_CASE("coverage sets") {
  Path3 p;
  auto ball = coverage_sets(p.me, 1.5, CoverKind::ball);
  CHECK(ball[1].count() == 3);  // d(1,0) = d(1,2) = 1
  auto order = coverage_sets(p.me, 1.5, CoverKind::order);
  CHECK(order[1].count() == 2);  // node 0 is not below node 1
  CHECK(order[1].test(1));
  CHECK(order[1].test(2));

  auto wide = coverage_sets(p.me, 10.0, CoverKind::ball);
  for (const auto& s : wide) CHECK(s.count() == 3);
}

TEST_CASE("exact covering counts on the three-node path") {
  Path3 p;
  CHECK(exact_cover_count(p.me, 1.5, CoverKind::ball) == 1);
  CHECK(exact_cover_count(p.me, 1.0, CoverKind::ball) == 3);
  CHECK(exact_cover_count(p.me, 1.5, CoverKind::order) == 2);
  CHECK(exact_cover_count(p.me, 1.0, CoverKind::order) == 3);

  Tree single = build_path(1);
  WeightSystem ws1 = assign(single, WeightLaw::constant(1.0), WeightLaw::constant(1.0), 1.0);
  MetricEvaluator m1(single, ws1);
  CHECK(exact_cover_count(m1, 0.1, CoverKind::ball) == 1);
  CHECK(exact_cover_count(m1, 0.1, CoverKind::order) == 1);
}

TEST_CASE("exact solver refuses oversized instances") {
  std::vector<Bitset> sets(600, Bitset(600));
  for (std::size_t i = 0; i < 600; ++i) sets[i].set(i);
  CHECK_THROWS_WITH(solve_min_cover(sets, CoverMode::exact), doctest::Contains("greedy"));
  CHECK(solve_min_cover(sets, CoverMode::greedy).size() == 600);
}

TEST_CASE("greedy order net covers and the exact count is never larger") {
  std::mt19937_64 rng(51);
  for (int i = 0; i < 30; ++i) {
    Tree t = testing::random_tree(rng, 40);
    WeightSystem ws = testing::random_weights(rng, t, testing::pick_q(rng));
    MetricEvaluator me(t, ws);
    double eps = me.diameter_upper() * 0.3;
    auto greedy = greedy_order_net(me, eps);
    CHECK(verify_certificate(me, greedy).ok);
    CHECK(static_cast<long long>(greedy.centers.size()) >=
          exact_cover_count(me, eps, CoverKind::order));
  }
}

TEST_CASE("covering number never exceeds the order covering number") {
  std::mt19937_64 rng(53);
  for (int i = 0; i < 40; ++i) {
    Tree t = testing::random_tree(rng, 35);
    WeightSystem ws = testing::random_weights(rng, t, testing::pick_q(rng));
    MetricEvaluator me(t, ws);
    double eps = me.diameter_upper() * (0.15 + 0.2 * (i % 4));
    CHECK(exact_cover_count(me, eps, CoverKind::ball) <=
          exact_cover_count(me, eps, CoverKind::order));
  }
}

TEST_CASE("order nets at doubled radius from ball covers") {
  Path3 p;
  CoverCertificate ball;
  ball.kind = CoverKind::ball;
  ball.epsilon = 1.5;
  ball.centers = {1};
  ball.verified = verify_certificate(p.me, ball).ok;
  REQUIRE(ball.verified);
  CoverCertificate order = order_net_from_cover(p.me, ball);
  CHECK(order.epsilon == doctest::Approx(3.0));
  CHECK(order.centers == std::vector<NodeId>{0});
  CHECK(order.verified);

  CoverCertificate root_only;
  root_only.kind = CoverKind::ball;
  root_only.epsilon = 10.0;
  root_only.centers = {0};
  root_only.verified = verify_certificate(p.me, root_only).ok;
  CHECK(order_net_from_cover(p.me, root_only).centers == std::vector<NodeId>{0});

  CoverCertificate unverified;
  unverified.kind = CoverKind::ball;
  unverified.epsilon = 1.5;
  unverified.centers = {1};
  unverified.verified = false;
  CHECK_THROWS_WITH(order_net_from_cover(p.me, unverified), doctest::Contains("unverified"));
}

TEST_CASE("order-net transform verifies on random instances") {
  std::mt19937_64 rng(59);
  for (int i = 0; i < 200; ++i) {
    Tree t = testing::random_tree(rng, 30);
    WeightSystem ws = testing::random_weights(rng, t, testing::pick_q(rng));
    MetricEvaluator me(t, ws);
    double eps = me.diameter_upper() * (0.1 + 0.15 * (i % 5));
    CoverCertificate ball = exact_cover(me, eps, CoverKind::ball);
    REQUIRE(ball.verified);
    CoverCertificate order = order_net_from_cover(me, ball);
    CHECK(order.verified);
    CHECK(order.centers.size() <= ball.centers.size());
    CHECK(exact_cover_count(me, 2.0 * eps, CoverKind::order) <=
          static_cast<long long>(ball.centers.size()));
  }
}

TEST_CASE("maximal separated sets") {
  Path3 p;
  auto pack = maximal_separated_set(p.me, 1.0);
  CHECK(pack.points == std::vector<NodeId>{0, 1, 2});
  CHECK(pack.pairwise_min >= 1.0);

  auto root_only = maximal_separated_set(p.me, 10.0);
  CHECK(root_only.points == std::vector<NodeId>{0});

  std::mt19937_64 rng(61);
  for (int i = 0; i < 50; ++i) {
    Tree t = testing::random_tree(rng, 30);
    WeightSystem w = testing::random_weights(rng, t, testing::pick_q(rng));
    MetricEvaluator m(t, w);
    double eps = m.diameter_upper() * 0.35;
    auto pk = maximal_separated_set(m, eps);
    CHECK(verify_certificate(m, pk).ok);
    // maximality makes it a net, so it is at least as large as the optimum
    CHECK(static_cast<long long>(pk.points.size()) >=
          exact_cover_count(m, eps, CoverKind::ball));
  }
}

TEST_CASE("interval families from packings") {
  Path3 p;
  IntervalFamily fam = separated_to_intervals(p.me, 0.5);
  REQUIRE(fam.intervals.size() == 2);
  CHECK(fam.intervals[0] == std::pair<NodeId, NodeId>{0, 1});
  CHECK(fam.intervals[1] == std::pair<NodeId, NodeId>{1, 2});
  CHECK(verify_family(p.me, fam).ok);

  Tree single = build_path(1);
  WeightSystem ws1 = assign(single, WeightLaw::constant(1.0), WeightLaw::constant(1.0), 1.0);
  MetricEvaluator m1(single, ws1);
  CHECK(separated_to_intervals(m1, 0.5).intervals.empty());

  std::mt19937_64 rng(67);
  for (int i = 0; i < 200; ++i) {
    Tree t = testing::random_tree(rng, 30);
    WeightSystem w = testing::random_weights(rng, t, testing::pick_q(rng));
    MetricEvaluator m(t, w);
    double eps = m.diameter_upper() * (0.08 + 0.1 * (i % 5));
    IntervalFamily f = separated_to_intervals(m, eps);
    CHECK(verify_family(m, f).ok);
    long long n2 = exact_cover_count(m, 2.0 * eps, CoverKind::ball);
    CHECK(static_cast<long long>(f.intervals.size()) >= n2 - 1);
  }
}

TEST_CASE("certificate verification failure modes") {
  Path3 p;
  CoverCertificate missing_root;
  missing_root.kind = CoverKind::order;
  missing_root.epsilon = 5.0;
  missing_root.centers = {1};
  auto v = verify_certificate(p.me, missing_root);
  CHECK(!v.ok);
  REQUIRE(!v.violations.empty());
  CHECK(v.violations.front() == 0);  // only the root can cover the root

  CoverCertificate zero_eps;
  zero_eps.kind = CoverKind::ball;
  zero_eps.epsilon = 0.0;
  zero_eps.centers = {0};
  CHECK(!verify_certificate(p.me, zero_eps).ok);

  PackingCertificate bad;
  bad.epsilon = 5.0;
  bad.points = {0, 1, 2};
  CHECK(!verify_certificate(p.me, bad).ok);
}

TEST_CASE("pairwise minimum uses the meet decomposition on large sets") {
  Tree bin = build_binary(12);
  WeightSystem ws = assign(bin, WeightLaw::polynomial(2.5), WeightLaw::constant(1.0), 2.0);
  MetricEvaluator me(bin, ws);
  std::vector<NodeId> pts;
  std::mt19937_64 rng(71);
  while (pts.size() < 1800) pts.push_back(static_cast<NodeId>(rng() % bin.node_count()));
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  REQUIRE(pts.size() > 1500);
  double fast = min_pairwise_distance(me, pts);
  double full_brute = 1e300;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      full_brute = std::min(full_brute, me.dist(pts[i], pts[j]));
  CHECK(fast == doctest::Approx(full_brute).epsilon(1e-12));
}

TEST_CASE("covering profiles") {
  Path3 p;
  CoveringProfile profile = covering_profile(p.me, {2.5, 1.5, 1.0, 0.5});
  REQUIRE(profile.ball.size() == 4);
  CHECK(profile.ball[0].value() == 1);
  CHECK(profile.ball[1].value() == 1);
  CHECK(profile.ball[2].value() == 3);
  CHECK(profile.ball[3].value() == 3);
  for (const auto& r : profile.ball) CHECK(r.exact);

  Tree single = build_path(1);
  WeightSystem ws1 = assign(single, WeightLaw::constant(1.0), WeightLaw::constant(1.0), 1.0);
  MetricEvaluator m1(single, ws1);
  auto p1 = covering_profile(m1, {1.0, 0.5});
  CHECK(p1.ball[0].value() == 1);
  CHECK(p1.order[1].value() == 1);

  CHECK_THROWS(covering_profile(p.me, {1.0, 1.0}));

  // bounds mode on a larger tree keeps lower <= upper
  Tree big = build_binary(10);
  WeightSystem wb = assign(big, WeightLaw::polynomial(2.5), WeightLaw::constant(1.0), 2.0);
  MetricEvaluator mb(big, wb);
  auto pb = covering_profile(mb, {0.5, 0.35}, 64);
  for (const auto& r : pb.order) {
    CHECK(!r.exact);
    CHECK(r.lower <= r.upper);
  }
}

TEST_CASE("certificate json round trip") {
  CoverCertificate cert;
  cert.kind = CoverKind::order;
  cert.epsilon = 1.5;
  cert.centers = {0, 1};
  cert.verified = true;
  std::string text = certificate_to_json(cert);
  auto parsed = nlohmann::json::parse(text);
  CHECK(parsed["kind"] == "order");
  CHECK(parsed["epsilon"] == 1.5);
  CHECK(parsed["centers"] == nlohmann::json::array({0, 1}));
  CHECK(parsed["verified"] == true);

  CoverCertificate back = cover_certificate_from_json(text);
  CHECK(back.kind == cert.kind);
  CHECK(back.epsilon == cert.epsilon);
  CHECK(back.centers == cert.centers);
  CHECK(back.verified == cert.verified);

  PackingCertificate pack;
  pack.epsilon = 0.25;
  pack.points = {0, 3, 5};
  pack.pairwise_min = 0.3;
  pack.construction = "truncation";
  PackingCertificate pback = packing_certificate_from_json(certificate_to_json(pack));
  CHECK(pback.points == pack.points);
  CHECK(pback.construction == "truncation");
}

TEST_CASE("order cover inequality across the radius doubling") {
  std::mt19937_64 rng(73);
  int checked = 0;
  for (int i = 0; i < 120; ++i) {
    Tree t = testing::random_tree(rng, 25);
    WeightSystem ws = testing::random_weights(rng, t, testing::pick_q(rng));
    MetricEvaluator me(t, ws);
    double diam = me.diameter_upper();
    for (double frac : {0.08, 0.15, 0.3, 0.5}) {
      double eps = diam * frac;
      long long n_ball = exact_cover_count(me, eps, CoverKind::ball);
      long long n_order = exact_cover_count(me, 2.0 * eps, CoverKind::order);
      CHECK(n_order <= n_ball);
      ++checked;
    }
  }
  CHECK(checked >= 400);
}
