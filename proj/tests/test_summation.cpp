#include <cmath>

#include "doctest.h"
#include "test_support.hpp"
#include "treesum/summation.hpp"

using namespace treesum;

TEST_CASE("sparse helpers") {
  SparseVec a{{0, 1.0}, {2, -2.0}};
  SparseVec b{{0, 1.0}, {1, 3.0}};
  CHECK(norm_1(a) == doctest::Approx(3.0));
  CHECK(norm_q(a, 2.0) == doctest::Approx(std::sqrt(5.0)));
  CHECK(dist_q(a, b, 1.0) == doctest::Approx(0.0 + 3.0 + 2.0));
  CHECK(dot(a, b) == doctest::Approx(1.0));
}

TEST_CASE("operator columns and application") {
  Tree path = build_path(3);
  WeightSystem ws = assign(path, WeightLaw::constant(1.0), WeightLaw::constant(1.0), 2.0);
  OperatorBundle op(path, ws);

  SparseVec c0 = op.column(0);
  REQUIRE(c0.size() == 1);
  CHECK(c0[0] == std::pair<NodeId, double>{0, 1.0});

  SparseVec c2 = op.column(2);
  REQUIRE(c2.size() == 3);
  for (auto [node, v] : c2) CHECK(v == doctest::Approx(1.0));

  SparseVec applied = op.apply({{2, 1.0}});
  CHECK(applied == c2);

  // linearity on random sparse pairs
  std::mt19937_64 rng(77);
  for (int i = 0; i < 30; ++i) {
    Tree t = testing::random_tree(rng, 20);
    WeightSystem w = testing::random_weights(rng, t, testing::pick_q(rng));
    OperatorBundle o(t, w);
    SparseVec x{{static_cast<NodeId>(rng() % t.node_count()), 1.3}};
    SparseVec y{{static_cast<NodeId>(rng() % t.node_count()), -0.7}};
    SparseVec sum = x;
    for (auto [n, v] : y) {
      bool merged = false;
      for (auto& [sn, sv] : sum)
        if (sn == n) {
          sv += v;
          merged = true;
        }
      if (!merged) sum.emplace_back(n, v);
    }
    std::sort(sum.begin(), sum.end());
    double d = dist_q(o.apply(sum), [&] {
      SparseVec ax = o.apply(x), ay = o.apply(y);
      SparseVec total = ax;
      for (auto [n, v] : ay) {
        bool merged = false;
        for (auto& [tn, tv] : total)
          if (tn == n) {
            tv += v;
            merged = true;
          }
        if (!merged) total.emplace_back(n, v);
      }
      std::sort(total.begin(), total.end());
      return total;
    }(), w.q);
    CHECK(d <= 1e-12);
  }
}

TEST_CASE("operator norm equals the boundedness statistic") {
  Tree path = build_path(3);
  WeightSystem ws = assign(path, WeightLaw::constant(1.0), WeightLaw::constant(1.0), 1.0);
  OperatorBundle op(path, ws);
  CHECK(op.operator_norm() == doctest::Approx(3.0));

  std::mt19937_64 rng(79);
  for (int i = 0; i < 100; ++i) {
    Tree t = testing::random_tree(rng, 40);
    WeightSystem w = testing::random_weights(rng, t, testing::pick_q(rng));
    OperatorBundle o(t, w);
    CHECK(o.operator_norm() == doctest::Approx(w.bound_stat).epsilon(1e-12));
  }
}

TEST_CASE("dyadic factorization by hand") {
  Tree path = build_path(3);
  WeightSystem ws = assign_values(path, {1, 1, 1}, {1.0, 0.5, 0.5}, 2.0);
  OperatorBundle op(path, ws);
  DyadicFactorization fact(op);

  CHECK(fact.band() == std::vector<int>{0, 1, 1});
  SparseVec z2 = fact.z_column(2);
  REQUIRE(z2.size() == 2);
  CHECK(z2[0] == std::pair<NodeId, double>{0, 0.5});
  CHECK(z2[1] == std::pair<NodeId, double>{2, 1.0});

  SparseVec w2 = fact.w_column(2);
  REQUIRE(w2.size() == 2);
  CHECK(w2[0] == std::pair<NodeId, double>{1, 0.5});
  CHECK(w2[1] == std::pair<NodeId, double>{2, 0.5});

  SparseVec composed = fact.composed_column(2);
  SparseVec direct = op.column(2);
  CHECK(dist_q(composed, direct, 2.0) <= 1e-15);

  // constant sigma keeps everything in band zero
  WeightSystem flat = assign(path, WeightLaw::constant(1.0), WeightLaw::constant(1.0), 2.0);
  DyadicFactorization id_fact(OperatorBundle{path, flat});
  CHECK(id_fact.band() == std::vector<int>{0, 0, 0});
  for (NodeId t = 0; t < 3; ++t) {
    CHECK(id_fact.z_column(t).size() == 1);
    CHECK(id_fact.delta(t) == doctest::Approx(1.0));
  }
}

TEST_CASE("factorization is exact with contractive pieces") {
  std::mt19937_64 rng(83);
  for (int i = 0; i < 120; ++i) {
    Tree t = testing::random_tree(rng, 50);
    WeightSystem w = testing::random_weights(rng, t, testing::pick_q(rng));
    OperatorBundle op(t, w);
    DyadicFactorization fact(op);
    CHECK(fact.factorization_residual() <= 1e-12);
    for (std::size_t n = 0; n < t.node_count(); ++n) {
      CHECK(fact.z_column_norm1(static_cast<NodeId>(n)) <= 2.0);
      double d = fact.delta(static_cast<NodeId>(n));
      CHECK(d > 0.5 - 1e-15);
      CHECK(d <= 1.0);
    }
  }
}

TEST_CASE("covering the partial-operator points") {
  // unit sigma: W = V on a path, columns at l1 distance |i - j|
  Tree path = build_path(3);
  WeightSystem ws = assign(path, WeightLaw::constant(1.0), WeightLaw::constant(1.0), 1.0);
  OperatorBundle op(path, ws);
  DyadicFactorization fact(op);
  WPointCover cover = cover_w_points(fact, 1.5);
  CHECK(cover.point_count == 3);
  CHECK(cover.cover_count == 1);  // the middle column reaches both neighbors

  // a radius beyond every norm is served by the origin alone
  WPointCover wide = cover_w_points(fact, 10.0);
  CHECK(wide.cover_count == 1);
}

TEST_CASE("partial-operator covering against order covers of the rounded metric") {
  std::mt19937_64 rng(89);
  for (int i = 0; i < 200; ++i) {
    Tree t = testing::random_tree(rng, 28);
    WeightSystem w = testing::random_weights(rng, t, testing::pick_q(rng));
    OperatorBundle op(t, w);
    DyadicFactorization fact(op);
    WeightSystem hat = fact.rounded_weights();
    MetricEvaluator me_hat(t, hat);
    double diam = me_hat.diameter_upper();
    for (double frac : {0.1, 0.25, 0.45}) {
      double eps = std::max(diam * frac, 1e-9);
      WPointCover cover = cover_w_points(fact, eps);
      long long order_count = exact_cover_count(me_hat, eps, CoverKind::order);
      CHECK(cover.cover_count <= order_count + 1);
    }
  }
}

TEST_CASE("identity inscription by hand") {
  Tree bin = build_binary(1);
  WeightSystem ws = assign(bin, WeightLaw::constant(1.0), WeightLaw::constant(1.0), 2.0);
  OperatorBundle op(bin, ws);
  IntervalFamily family;
  family.epsilon = 1.0;
  family.intervals = {{0, 1}, {0, 2}};
  Inscription ins = inscribe_identity(op, family);
  REQUIRE(ins.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(ins.maximizers[i] == family.intervals[i].second);
    CHECK(norm_1(ins.y[i]) <= 2.0);
    CHECK(ins.diagonal[i] == doctest::Approx(1.0));
    auto proj = ins.project(ins.z[i]);
    for (std::size_t j = 0; j < 2; ++j) {
      if (i == j)
        CHECK(proj[j] == doctest::Approx(1.0));
      else
        CHECK(proj[j] == 0.0);
    }
  }

  // single interval on a two-node path: the diagonal is the edge distance
  Tree p2 = build_path(2);
  WeightSystem w2 = assign_values(p2, {1.0, 0.8}, {1.0, 0.6}, 2.0);
  OperatorBundle op2(p2, w2);
  MetricEvaluator me2(p2, w2);
  IntervalFamily f2;
  f2.epsilon = me2.dist(0, 1) * 0.99;
  f2.intervals = {{0, 1}};
  Inscription one = inscribe_identity(op2, f2);
  CHECK(one.diagonal[0] == doctest::Approx(me2.dist(0, 1)));
}

TEST_CASE("inscription reconstructs the identity block") {
  std::mt19937_64 rng(97);
  int nontrivial = 0;
  for (int i = 0; i < 100; ++i) {
    Tree t = testing::random_tree(rng, 40);
    WeightSystem w = testing::random_weights(rng, t, testing::pick_q(rng));
    MetricEvaluator me(t, w);
    OperatorBundle op(t, w);
    IntervalFamily family = separated_to_intervals(me, me.diameter_upper() * 0.12);
    if (family.intervals.empty()) continue;
    ++nontrivial;
    Inscription ins = inscribe_identity(op, family);
    for (std::size_t a = 0; a < ins.size(); ++a) {
      CHECK(norm_q(ins.b[a], w.q / (w.q - 1.0)) == doctest::Approx(1.0));
      CHECK(dist_q(op.apply(ins.y[a]), ins.z[a], w.q) <= 1e-12 * (1.0 + norm_q(ins.z[a], w.q)));
      auto proj = ins.project(ins.z[a]);
      for (std::size_t bidx = 0; bidx < ins.size(); ++bidx) {
        if (a == bidx)
          CHECK(proj[bidx] >= family.epsilon * (1 - 1e-12));
        else
          CHECK(proj[bidx] == 0.0);  // disjoint supports: exactly zero
      }
    }
  }
  CHECK(nontrivial >= 50);

  // rejects an unverified family
  Tree p = build_path(3);
  WeightSystem w = assign(p, WeightLaw::constant(1.0), WeightLaw::constant(1.0), 2.0);
  OperatorBundle op(p, w);
  IntervalFamily broken;
  broken.epsilon = 100.0;
  broken.intervals = {{0, 2}};
  CHECK_THROWS_WITH(inscribe_identity(op, broken), doctest::Contains("verification"));
}

TEST_CASE("projection is non-expansive") {
  std::mt19937_64 rng(101);
  int probes = 0;
  while (probes < 10000) {
    Tree t = testing::random_tree(rng, 30);
    WeightSystem w = testing::random_weights(rng, t, testing::pick_q(rng));
    MetricEvaluator me(t, w);
    OperatorBundle op(t, w);
    IntervalFamily family = separated_to_intervals(me, me.diameter_upper() * 0.15);
    if (family.intervals.empty()) continue;
    Inscription ins = inscribe_identity(op, family);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (int r = 0; r < 200; ++r, ++probes) {
      SparseVec z;
      for (std::size_t n = 0; n < t.node_count(); ++n)
        if (rng() % 3 == 0) z.emplace_back(static_cast<NodeId>(n), unif(rng));
      double pn = ins.project_norm(z);
      CHECK(pn <= norm_q(z, w.q) * (1 + 1e-12));
    }
  }
}

TEST_CASE("entropy brackets") {
  Tree p2 = build_path(2);
  WeightSystem w2 = assign(p2, WeightLaw::constant(1.0), WeightLaw::constant(1.0), 2.0);
  OperatorBundle op2(p2, w2);
  EntropyBracket e1 = entropy_bracket(op2, 1);
  CHECK(e1.lower == e1.upper);
  CHECK(e1.upper == doctest::Approx(std::sqrt(2.0)));

  std::mt19937_64 rng(103);
  for (int i = 0; i < 6; ++i) {
    Tree t = testing::random_tree(rng, 8);
    WeightSystem w = testing::random_weights(rng, t, 2.0);
    OperatorBundle op(t, w);
    EntropyBracket first = entropy_bracket(op, 1);
    double max_norm = 0.0;
    for (std::size_t n = 0; n < t.node_count(); ++n)
      max_norm = std::max(max_norm, norm_q(op.column(static_cast<NodeId>(n)), w.q));
    CHECK(first.lower == max_norm);
    CHECK(first.upper == max_norm);

    for (int n : {2, 3}) {
      EntropyBracket coarse = entropy_bracket(op, n, 0.25);
      EntropyBracket fine = entropy_bracket(op, n, 0.125);
      CHECK(coarse.lower <= coarse.upper * (1 + 1e-12));
      CHECK(fine.lower <= fine.upper * (1 + 1e-12));
      // the additive grid error halves under refinement
      CHECK(fine.grid_error == doctest::Approx(coarse.grid_error / 2.0));
    }
  }

  Tree big = build_binary(4);
  WeightSystem wb = assign(big, WeightLaw::constant(1.0), WeightLaw::constant(1.0), 2.0);
  OperatorBundle opb(big, wb);
  CHECK_THROWS(entropy_bracket(opb, 2));
  CHECK_THROWS(entropy_bracket(op2, 9));
}

TEST_CASE("identity entropy shape") {
  CHECK(schuett_shape(100, 100, 2.0) == doctest::Approx(std::sqrt(std::log(2.0) / 100.0)));
  CHECK(schuett_shape(100, 10, 2.0) == doctest::Approx(0.489683).epsilon(1e-5));
  double prev = 1e300;
  for (long long n = 5; n <= 100; n += 5) {
    double v = schuett_shape(100, n, 2.0);
    CHECK(v < prev);
    prev = v;
  }
  CHECK_THROWS_AS(schuett_shape(100, 2, 2.0), std::out_of_range);
  CHECK_THROWS_AS(schuett_shape(100, 200, 2.0), std::out_of_range);
}
