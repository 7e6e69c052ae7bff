#pragma once

#include <random>
#include <vector>

#include "treesum/metric.hpp"
#include "treesum/weights.hpp"

namespace treesum::testing {

/// Random attachment tree; chain_bias skews toward deeper shapes.
inline Tree random_tree(std::mt19937_64& rng, int max_nodes, double chain_bias = 0.3) {
  int n = 2 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_nodes - 1));
  std::vector<NodeId> parent(static_cast<std::size_t>(n), kNoNode);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int i = 1; i < n; ++i) {
    if (unif(rng) < chain_bias)
      parent[static_cast<std::size_t>(i)] = static_cast<NodeId>(i - 1);
    else
      parent[static_cast<std::size_t>(i)] =
          static_cast<NodeId>(rng() % static_cast<std::uint64_t>(i));
  }
  return Tree::from_parents(std::move(parent));
}

/// Random positive alpha and random non-increasing sigma (root scale varies).
inline WeightSystem random_weights(std::mt19937_64& rng, const Tree& tree, double q) {
  std::uniform_real_distribution<double> a_dist(0.25, 2.5);
  std::uniform_real_distribution<double> shrink(0.55, 1.0);
  std::uniform_real_distribution<double> scale(0.5, 2.0);
  std::vector<double> alpha(tree.node_count()), sigma(tree.node_count());
  for (std::size_t i = 0; i < tree.node_count(); ++i) {
    alpha[i] = a_dist(rng);
    sigma[i] = i == 0 ? scale(rng)
                      : sigma[static_cast<std::size_t>(tree.parent(static_cast<NodeId>(i)))] *
                            shrink(rng);
  }
  return assign_values(tree, std::move(alpha), std::move(sigma), q);
}

inline double pick_q(std::mt19937_64& rng) {
  constexpr double qs[] = {1.5, 2.0, 3.0};
  return qs[rng() % 3];
}

/// Brute-force distance straight from the definition, as an independent check
/// of the evaluator's prefix/meet machinery.
inline double brute_dist(const Tree& tree, const WeightSystem& ws, NodeId t, NodeId s) {
  auto chain_dist = [&](NodeId lo, NodeId hi) {
    double best = 0.0;
    for (NodeId v = hi; v != lo; v = tree.parent(v)) {
      double sum = 0.0;
      for (NodeId r = v; r != lo; r = tree.parent(r)) sum += std::pow(ws.alpha_at(r), ws.q);
      best = std::max(best, std::pow(sum, 1.0 / ws.q) * ws.sigma_at(v));
    }
    return best;
  };
  if (t == s) return 0.0;
  NodeId m = tree.meet(t, s);
  if (m == t) return chain_dist(t, s);
  if (m == s) return chain_dist(s, t);
  return chain_dist(m, t) + chain_dist(m, s);
}

}  // namespace treesum::testing
