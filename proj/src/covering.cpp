#include "treesum/covering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "json.hpp"

namespace treesum {

std::vector<Bitset> coverage_sets(const MetricEvaluator& me, double eps, CoverKind kind) {
  const Tree& tree = me.tree();
  const std::size_t n = tree.node_count();
  std::vector<Bitset> sets(n, Bitset(n));
  for (std::size_t s = 0; s < n; ++s) {
    auto center = static_cast<NodeId>(s);
    if (kind == CoverKind::ball) {
      for (std::size_t t = 0; t < n; ++t)
        if (covers(me.dist(center, static_cast<NodeId>(t)), eps)) sets[s].set(t);
    } else {
      // Descendants within eps: run the incremental max down the subtree and
      // prune where it already exceeds eps (monotone along paths).
      std::vector<std::pair<NodeId, double>> stack{{center, 0.0}};
      while (!stack.empty()) {
        auto [t, run] = stack.back();
        stack.pop_back();
        if (!covers(run, eps)) continue;
        sets[s].set(static_cast<std::size_t>(t));
        for (NodeId c : tree.children(t)) stack.emplace_back(c, me.extend_run(run, center, c));
      }
    }
  }
  return sets;
}

namespace {

std::vector<std::size_t> greedy_cover(const std::vector<Bitset>& sets, std::size_t universe) {
  Bitset uncovered(universe);
  for (std::size_t i = 0; i < universe; ++i) uncovered.set(i);
  std::vector<std::size_t> chosen;
  while (uncovered.any()) {
    std::size_t best = Bitset::npos, best_gain = 0;
    for (std::size_t i = 0; i < sets.size(); ++i) {
      std::size_t gain = sets[i].count_and(uncovered);
      if (gain > best_gain) {
        best_gain = gain;
        best = i;
      }
    }
    if (best == Bitset::npos)
      throw std::runtime_error("min cover: some element is covered by no candidate");
    chosen.push_back(best);
    uncovered.and_not(sets[best]);
  }
  return chosen;
}

struct ExactCoverSearch {
  const std::vector<Bitset>& sets;
  std::size_t universe;
  std::vector<std::vector<std::size_t>> covering_candidates;  // per element
  std::vector<std::size_t> best;
  std::vector<std::size_t> current;

  ExactCoverSearch(const std::vector<Bitset>& s, std::size_t u) : sets(s), universe(u) {
    covering_candidates.resize(universe);
    for (std::size_t i = 0; i < sets.size(); ++i)
      for (std::size_t e = sets[i].find_next(0); e != Bitset::npos; e = sets[i].find_next(e + 1))
        covering_candidates[e].push_back(i);
  }

  std::size_t packing_lower_bound(const Bitset& uncovered) const {
    // Elements whose candidate sets are pairwise disjoint each need their own
    // set in any cover.
    std::vector<std::size_t> order;
    for (std::size_t e = uncovered.find_next(0); e != Bitset::npos; e = uncovered.find_next(e + 1))
      order.push_back(e);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return covering_candidates[a].size() < covering_candidates[b].size();
    });
    std::vector<bool> used(sets.size(), false);
    std::size_t lb = 0;
    for (std::size_t e : order) {
      bool free = true;
      for (std::size_t c : covering_candidates[e])
        if (used[c]) {
          free = false;
          break;
        }
      if (!free) continue;
      ++lb;
      for (std::size_t c : covering_candidates[e]) used[c] = true;
    }
    return lb;
  }

  void run(Bitset& uncovered) {
    if (!uncovered.any()) {
      best = current;
      return;
    }
    if (current.size() + packing_lower_bound(uncovered) >= best.size()) return;
    // Branch on the element with the fewest live candidates.
    std::size_t pick = Bitset::npos, fewest = std::numeric_limits<std::size_t>::max();
    for (std::size_t e = uncovered.find_next(0); e != Bitset::npos;
         e = uncovered.find_next(e + 1)) {
      std::size_t deg = covering_candidates[e].size();
      if (deg < fewest) {
        fewest = deg;
        pick = e;
      }
    }
    std::vector<std::size_t> branches = covering_candidates[pick];
    std::sort(branches.begin(), branches.end(), [&](std::size_t a, std::size_t b) {
      return sets[a].count_and(uncovered) > sets[b].count_and(uncovered);
    });
    for (std::size_t c : branches) {
      Bitset next = uncovered;
      next.and_not(sets[c]);
      current.push_back(c);
      run(next);
      current.pop_back();
      if (current.size() + 1 >= best.size()) break;  // deeper branches cannot win
    }
  }
};

}  // namespace

std::vector<std::size_t> solve_min_cover(const std::vector<Bitset>& sets, CoverMode mode,
                                         std::size_t limit) {
  if (sets.empty()) throw std::invalid_argument("min cover: no candidate sets");
  std::size_t universe = sets.front().size();
  if (mode == CoverMode::greedy) return greedy_cover(sets, universe);
  if (sets.size() > limit)
    throw std::invalid_argument("min cover: " + std::to_string(sets.size()) +
                                " candidates exceed the exact-mode limit " +
                                std::to_string(limit) + "; use greedy mode");
  ExactCoverSearch search(sets, universe);
  for (std::size_t e = 0; e < universe; ++e)
    if (search.covering_candidates[e].empty())
      throw std::runtime_error("min cover: some element is covered by no candidate");
  search.best = greedy_cover(sets, universe);
  Bitset uncovered(universe);
  for (std::size_t i = 0; i < universe; ++i) uncovered.set(i);
  search.run(uncovered);
  return search.best;
}

CoverCertificate exact_cover(const MetricEvaluator& me, double eps, CoverKind kind) {
  auto sets = coverage_sets(me, eps, kind);
  auto chosen = solve_min_cover(sets, CoverMode::exact);
  CoverCertificate cert;
  cert.kind = kind;
  cert.epsilon = eps;
  for (auto c : chosen) cert.centers.push_back(static_cast<NodeId>(c));
  std::sort(cert.centers.begin(), cert.centers.end());
  cert.verified = verify_certificate(me, cert).ok;
  return cert;
}

long long exact_cover_count(const MetricEvaluator& me, double eps, CoverKind kind) {
  auto sets = coverage_sets(me, eps, kind);
  return static_cast<long long>(solve_min_cover(sets, CoverMode::exact).size());
}

CoverCertificate greedy_order_net(const MetricEvaluator& me, double eps) {
  const Tree& tree = me.tree();
  const std::size_t n = tree.node_count();
  std::vector<bool> covered(n, false);
  std::vector<std::size_t> level_cursor(static_cast<std::size_t>(tree.max_depth()) + 1, 0);
  int deepest = tree.max_depth();

  CoverCertificate cert;
  cert.kind = CoverKind::order;
  cert.epsilon = eps;

  auto count_or_mark = [&](NodeId anchor, bool mark) {
    // Walk the subtree of anchor, pruning once the running max leaves the
    // ball; count (or mark) uncovered nodes inside.
    std::size_t cnt = 0;
    std::vector<std::pair<NodeId, double>> stack{{anchor, 0.0}};
    while (!stack.empty()) {
      auto [t, run] = stack.back();
      stack.pop_back();
      if (!covers(run, eps)) continue;
      auto ti = static_cast<std::size_t>(t);
      if (!covered[ti]) {
        ++cnt;
        if (mark) covered[ti] = true;
      }
      for (NodeId c : tree.children(t)) stack.emplace_back(c, me.extend_run(run, anchor, c));
    }
    return cnt;
  };

  while (true) {
    NodeId target = kNoNode;
    while (deepest >= 0) {
      const auto& lvl = tree.level(deepest);
      auto& cur = level_cursor[static_cast<std::size_t>(deepest)];
      while (cur < lvl.size() && covered[static_cast<std::size_t>(lvl[cur])]) ++cur;
      if (cur < lvl.size()) {
        target = lvl[cur];
        break;
      }
      --deepest;
    }
    if (target == kNoNode) break;

    // Candidate ancestors with d(a, target) < eps form the deepest segment of
    // the root path; walk up until the distance leaves the ball.
    NodeId best = target;
    std::size_t best_gain = 0;
    for (NodeId a = target; a != kNoNode; a = tree.parent(a)) {
      if (a != target && !covers(me.dist_comparable(a, target), eps)) break;
      std::size_t gain = count_or_mark(a, false);
      if (gain >= best_gain) {  // ties toward the shallowest
        best_gain = gain;
        best = a;
      }
    }
    count_or_mark(best, true);
    cert.centers.push_back(best);
  }
  std::sort(cert.centers.begin(), cert.centers.end());
  cert.centers.erase(std::unique(cert.centers.begin(), cert.centers.end()), cert.centers.end());
  cert.verified = true;  // covered[] reached every node by construction
  return cert;
}

PackingCertificate maximal_separated_set(const MetricEvaluator& me, double eps) {
  const Tree& tree = me.tree();
  PackingCertificate cert;
  cert.epsilon = eps;
  double min_pair = std::numeric_limits<double>::infinity();
  for (int n = 0; n <= tree.max_depth(); ++n) {
    for (NodeId t : tree.level(n)) {
      bool separated = true;
      for (NodeId p : cert.points) {
        if (covers(me.dist(p, t), eps)) {
          separated = false;
          break;
        }
      }
      if (separated) {
        for (NodeId p : cert.points) min_pair = std::min(min_pair, me.dist(p, t));
        cert.points.push_back(t);
      }
    }
  }
  cert.pairwise_min = cert.points.size() > 1 ? min_pair : std::numeric_limits<double>::infinity();
  return cert;
}

IntervalFamily separated_to_intervals(const MetricEvaluator& me, double eps) {
  const Tree& tree = me.tree();
  PackingCertificate sep = maximal_separated_set(me, 2.0 * eps);
  IntervalFamily family;
  family.epsilon = eps;
  bool dropped = false;
  for (NodeId s : sep.points) {
    if (s == 0 || (!dropped && covers(me.dist_comparable(0, s), eps))) {
      dropped = true;  // at most one point lies within eps of the root
      continue;
    }
    NodeId t = tree.parent(s);
    while (covers(me.dist_comparable(t, s), eps)) t = tree.parent(t);
    family.intervals.emplace_back(t, s);
  }
  return family;
}

CoverCertificate order_net_from_cover(const MetricEvaluator& me, const CoverCertificate& cert) {
  if (cert.kind != CoverKind::ball)
    throw std::invalid_argument("order_net_from_cover: input must be a ball cover");
  if (!cert.verified)
    throw std::invalid_argument("order_net_from_cover: input certificate is unverified");
  const Tree& tree = me.tree();
  const std::size_t n = tree.node_count();
  CoverCertificate out;
  out.kind = CoverKind::order;
  out.epsilon = 2.0 * cert.epsilon;
  for (NodeId s : cert.centers) {
    // Shallowest meet r ^ s over the ball around s; meets with s form a chain
    // on the root path of s.
    NodeId best = s;
    for (std::size_t r = 0; r < n; ++r) {
      auto rn = static_cast<NodeId>(r);
      if (!covers(me.dist(rn, s), cert.epsilon)) continue;
      NodeId m = tree.meet(rn, s);
      if (tree.depth(m) < tree.depth(best)) best = m;
    }
    out.centers.push_back(best);
  }
  std::sort(out.centers.begin(), out.centers.end());
  out.centers.erase(std::unique(out.centers.begin(), out.centers.end()), out.centers.end());
  out.verified = verify_certificate(me, out).ok;
  return out;
}

Verification verify_certificate(const MetricEvaluator& me, const CoverCertificate& cert) {
  const Tree& tree = me.tree();
  const std::size_t n = tree.node_count();
  Verification v;
  if (cert.kind == CoverKind::ball) {
    for (std::size_t t = 0; t < n; ++t) {
      double best = std::numeric_limits<double>::infinity();
      for (NodeId s : cert.centers)
        best = std::min(best, me.dist(s, static_cast<NodeId>(t)));
      if (!covers(best, cert.epsilon)) {
        v.ok = false;
        v.violations.push_back(static_cast<NodeId>(t));
        v.worst = std::max(v.worst, best);
      }
    }
    return v;
  }
  // Order cover: by path monotonicity of the metric the deepest center
  // ancestor is the closest one, so one pass with a running max per node
  // suffices. O(node count) memory and time.
  std::vector<bool> is_center(n, false);
  for (NodeId s : cert.centers) {
    tree.check_node(s);
    is_center[static_cast<std::size_t>(s)] = true;
  }
  std::vector<NodeId> anchor(n, kNoNode);
  std::vector<double> run(n, 0.0);
  for (std::size_t t = 0; t < n; ++t) {
    auto node = static_cast<NodeId>(t);
    if (is_center[t]) {
      anchor[t] = node;
      run[t] = 0.0;
      continue;
    }
    NodeId p = tree.parent(node);
    NodeId a = (p == kNoNode) ? kNoNode : anchor[static_cast<std::size_t>(p)];
    if (a == kNoNode) {
      v.ok = false;
      v.violations.push_back(node);
      continue;
    }
    anchor[t] = a;
    run[t] = me.extend_run(run[static_cast<std::size_t>(p)], a, node);
    if (!covers(run[t], cert.epsilon)) {
      v.ok = false;
      v.violations.push_back(node);
      v.worst = std::max(v.worst, run[t]);
    }
  }
  return v;
}

double min_pairwise_distance(const MetricEvaluator& me, const std::vector<NodeId>& points) {
  const Tree& tree = me.tree();
  if (points.size() < 2) return std::numeric_limits<double>::infinity();
  if (points.size() <= 1500) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < points.size(); ++i)
      for (std::size_t j = i + 1; j < points.size(); ++j)
        best = std::min(best, me.dist(points[i], points[j]));
    return best;
  }
  // Large sets: with constant sigma, d(t,s) = (A(s)-A(t))^(1/q) on chains and
  // (A(x)-A(u))^(1/q) + (A(y)-A(u))^(1/q) across a meet u, so per node only
  // the minimal prefix value of a point in each child subtree matters.
  const WeightSystem& ws = me.weights();
  for (double s : ws.sigma)
    if (!nearly_equal(s, 1.0))
      throw std::invalid_argument(
          "min_pairwise_distance: set too large for brute force and sigma is not constant");
  const double q = ws.q;
  const double scale = ws.sigma_scale;
  const std::size_t n = tree.node_count();
  std::vector<bool> is_point(n, false);
  for (NodeId p : points) is_point[static_cast<std::size_t>(p)] = true;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> min_prefix(n, inf);  // over points strictly inside the subtree
  double best = inf;
  for (std::size_t t = n; t-- > 0;) {
    auto node = static_cast<NodeId>(t);
    double at = me.prefix(node);
    double lo1 = inf, lo2 = inf;  // two smallest child-subtree point prefixes
    for (NodeId c : tree.children(node)) {
      double v = min_prefix[static_cast<std::size_t>(c)];
      if (v < lo1) {
        lo2 = lo1;
        lo1 = v;
      } else if (v < lo2) {
        lo2 = v;
      }
    }
    // Pair with meet at this node: either two points in distinct child
    // subtrees, or this node itself paired with the closest point below it.
    if (lo2 < inf)
      best = std::min(best, scale * (std::pow(std::max(0.0, lo1 - at), 1.0 / q) +
                                     std::pow(std::max(0.0, lo2 - at), 1.0 / q)));
    if (is_point[t] && lo1 < inf)
      best = std::min(best, scale * std::pow(std::max(0.0, lo1 - at), 1.0 / q));
    min_prefix[t] = is_point[t] ? std::min(at, lo1) : lo1;
  }
  return best;
}

Verification verify_certificate(const MetricEvaluator& me, const PackingCertificate& cert) {
  Verification v;
  double m = min_pairwise_distance(me, cert.points);
  v.worst = m;
  if (cert.points.size() > 1 && !(m >= cert.epsilon * (1.0 - kRelTol))) v.ok = false;
  return v;
}

Verification verify_family(const MetricEvaluator& me, const IntervalFamily& family) {
  const Tree& tree = me.tree();
  Verification v;
  std::vector<char> marked(tree.node_count(), 0);
  for (const auto& [t, s] : family.intervals) {
    if (!tree.is_ancestor(t, s) || t == s) {
      v.ok = false;
      v.violations.push_back(s);
      continue;
    }
    double d = me.dist_comparable(t, s);
    if (!(d >= family.epsilon * (1.0 - kRelTol))) {
      v.ok = false;
      v.violations.push_back(s);
      v.worst = std::max(v.worst, d);
    }
    for (NodeId r = s; r != t; r = tree.parent(r)) {
      auto ri = static_cast<std::size_t>(r);
      if (marked[ri]) {
        v.ok = false;
        v.violations.push_back(r);  // intervals overlap
      }
      marked[ri] = 1;
    }
  }
  return v;
}

CoveringProfile covering_profile(const MetricEvaluator& me, const std::vector<double>& eps_grid,
                                 std::size_t exact_limit) {
  for (std::size_t i = 1; i < eps_grid.size(); ++i)
    if (!(eps_grid[i] < eps_grid[i - 1]))
      throw std::invalid_argument("covering_profile: grid must strictly decrease");
  const std::size_t n = me.tree().node_count();
  CoveringProfile profile;
  profile.eps_grid = eps_grid;
  profile.ball.resize(eps_grid.size());
  profile.order.resize(eps_grid.size());
  parallel_for(eps_grid.size(), [&](std::size_t i) {
    double eps = eps_grid[i];
    CountRecord ball, order;
    ball.epsilon = order.epsilon = eps;
    if (n <= exact_limit) {
      ball.exact = order.exact = true;
      ball.lower = ball.upper = exact_cover_count(me, eps, CoverKind::ball);
      order.lower = order.upper = exact_cover_count(me, eps, CoverKind::order);
    } else {
      auto net = greedy_order_net(me, eps);
      auto packing = maximal_separated_set(me, 2.0 * eps);
      long long lo = static_cast<long long>(packing.points.size());
      order.upper = static_cast<long long>(net.centers.size());
      order.lower = std::min(lo, order.upper);
      ball.upper = order.upper;  // an order net is a net
      ball.lower = order.lower;
    }
    profile.ball[i] = ball;
    profile.order[i] = order;
  });
  for (std::size_t i = 1; i < eps_grid.size(); ++i) {
    if (profile.ball[i].exact && profile.ball[i - 1].exact &&
        profile.ball[i].value() < profile.ball[i - 1].value())
      throw std::logic_error("covering_profile: exact counts decreased along the grid");
    if (profile.order[i].exact && profile.order[i - 1].exact &&
        profile.order[i].value() < profile.order[i - 1].value())
      throw std::logic_error("covering_profile: exact order counts decreased along the grid");
  }
  return profile;
}

namespace {

nlohmann::json cover_json(const CoverCertificate& cert) {
  nlohmann::json j;
  j["kind"] = cert.kind == CoverKind::ball ? "ball" : "order";
  j["epsilon"] = cert.epsilon;
  j["centers"] = cert.centers;
  j["verified"] = cert.verified;
  if (!cert.construction.empty()) j["construction"] = cert.construction;
  return j;
}

}  // namespace

std::string certificate_to_json(const CoverCertificate& cert) { return cover_json(cert).dump(); }

std::string certificate_to_json(const PackingCertificate& cert) {
  nlohmann::json j;
  j["kind"] = "packing";
  j["epsilon"] = cert.epsilon;
  j["points"] = cert.points;
  j["pairwise_min"] = cert.pairwise_min;
  if (!cert.construction.empty()) j["construction"] = cert.construction;
  return j.dump();
}

CoverCertificate cover_certificate_from_json(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  CoverCertificate cert;
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "ball")
    cert.kind = CoverKind::ball;
  else if (kind == "order")
    cert.kind = CoverKind::order;
  else
    throw std::invalid_argument("certificate json: unknown kind " + kind);
  cert.epsilon = j.at("epsilon").get<double>();
  cert.centers = j.at("centers").get<std::vector<NodeId>>();
  cert.verified = j.value("verified", false);
  cert.construction = j.value("construction", std::string{});
  return cert;
}

PackingCertificate packing_certificate_from_json(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  PackingCertificate cert;
  cert.epsilon = j.at("epsilon").get<double>();
  cert.points = j.at("points").get<std::vector<NodeId>>();
  cert.pairwise_min = j.at("pairwise_min").get<double>();
  cert.construction = j.value("construction", std::string{});
  return cert;
}

}  // namespace treesum
