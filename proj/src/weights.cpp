#include "treesum/weights.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "treesum/util.hpp"

namespace treesum {

WeightLaw WeightLaw::constant(double c) {
  if (!(c > 0)) throw std::invalid_argument("weight law: constant must be positive");
  WeightLaw w;
  w.kind = Kind::constant;
  w.c = c;
  return w;
}

WeightLaw WeightLaw::polynomial(double gamma, double c) {
  if (!(c > 0)) throw std::invalid_argument("weight law: scale must be positive");
  WeightLaw w;
  w.kind = Kind::polynomial;
  w.gamma = gamma;
  w.c = c;
  return w;
}

WeightLaw WeightLaw::exponential(double gamma, double c) {
  if (!(c > 0)) throw std::invalid_argument("weight law: scale must be positive");
  WeightLaw w;
  w.kind = Kind::exponential;
  w.gamma = gamma;
  w.c = c;
  return w;
}

WeightLaw WeightLaw::per_level(std::vector<double> values) {
  WeightLaw w;
  w.kind = Kind::per_level;
  w.table = std::move(values);
  return w;
}

WeightLaw WeightLaw::per_node(std::vector<double> values) {
  WeightLaw w;
  w.kind = Kind::per_node;
  w.table = std::move(values);
  return w;
}

double WeightLaw::value(int depth, NodeId node, double q) const {
  switch (kind) {
    case Kind::constant:
      return c;
    case Kind::polynomial:
      return c * std::pow(std::max(1.0, static_cast<double>(depth)), -gamma / q);
    case Kind::exponential:
      return c * std::exp2(-gamma * static_cast<double>(depth) / q);
    case Kind::per_level:
      if (static_cast<std::size_t>(depth) >= table.size())
        throw std::invalid_argument("weight law: level table too short");
      return table[static_cast<std::size_t>(depth)];
    case Kind::per_node:
      if (static_cast<std::size_t>(node) >= table.size())
        throw std::invalid_argument("weight law: node table too short");
      return table[static_cast<std::size_t>(node)];
  }
  throw std::logic_error("weight law: bad kind");
}

std::vector<double> WeightSystem::alpha_pow_prefix() const {
  std::vector<double> a(alpha.size());
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    double v = std::pow(alpha[i], q);
    a[i] = (i == 0) ? v : a[static_cast<std::size_t>(tree->parent(static_cast<NodeId>(i)))] + v;
  }
  return a;
}

std::vector<double> WeightSystem::alpha_sq_prefix() const {
  std::vector<double> a(alpha.size());
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    double v = alpha[i] * alpha[i];
    a[i] = (i == 0) ? v : a[static_cast<std::size_t>(tree->parent(static_cast<NodeId>(i)))] + v;
  }
  return a;
}

WeightSystem assign_values(const Tree& tree, std::vector<double> alpha, std::vector<double> sigma,
                           double q) {
  const std::size_t n = tree.node_count();
  if (alpha.size() != n || sigma.size() != n)
    throw std::invalid_argument("assign: weight vectors must cover every node");
  if (!(q >= 1.0) || !std::isfinite(q))
    throw std::invalid_argument("assign: q must lie in [1, infinity)");
  for (std::size_t i = 0; i < n; ++i)
    if (!(alpha[i] > 0) || !(sigma[i] > 0))
      throw std::invalid_argument("assign: weights must be strictly positive");

  std::ostringstream bad;
  int bad_count = 0;
  for (std::size_t i = 1; i < n; ++i) {
    auto p = static_cast<std::size_t>(tree.parent(static_cast<NodeId>(i)));
    if (sigma[i] > sigma[p]) {
      if (bad_count < 8) bad << " (" << p << " -> " << i << ")";
      ++bad_count;
    }
  }
  if (bad_count > 0)
    throw std::invalid_argument("assign: sigma increases along " + std::to_string(bad_count) +
                                " edge(s):" + bad.str());

  WeightSystem ws;
  ws.tree = &tree;
  ws.q = q;
  ws.alpha = std::move(alpha);
  ws.sigma = std::move(sigma);
  ws.sigma_scale = ws.sigma[0];
  for (auto& s : ws.sigma) s /= ws.sigma_scale;
  ws.sigma[0] = 1.0;
  ws.bound_stat = boundedness_statistic(ws);
  return ws;
}

WeightSystem assign(const Tree& tree, const WeightLaw& alpha_law, const WeightLaw& sigma_law,
                    double q) {
  const std::size_t n = tree.node_count();
  std::vector<double> alpha(n), sigma(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto node = static_cast<NodeId>(i);
    alpha[i] = alpha_law.value(tree.depth(node), node, q);
    sigma[i] = sigma_law.value(tree.depth(node), node, q);
  }
  return assign_values(tree, std::move(alpha), std::move(sigma), q);
}

double boundedness_statistic(const WeightSystem& ws) {
  auto a = ws.alpha_pow_prefix();
  double best = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    best = std::max(best, std::pow(a[i], 1.0 / ws.q) * ws.sigma_at(static_cast<NodeId>(i)));
  return best;
}

double mazya_rosin_statistic(const WeightSystem& ws, double p) {
  const Tree& tree = *ws.tree;
  if (tree.kind() != Tree::Kind::path)
    throw std::domain_error("mazya_rosin_statistic: requires a path tree");
  if (!(p >= 1.0) || !(p <= ws.q))
    throw std::invalid_argument("mazya_rosin_statistic: need 1 <= p <= q");
  const std::size_t n = tree.node_count();
  auto a = ws.alpha_pow_prefix();
  if (p == 1.0) {
    // p' = infinity; sigma non-increasing makes the tail sup collapse to
    // sigma(v), so this is exactly the boundedness statistic.
    double best = 0.0;
    for (std::size_t v = 0; v < n; ++v)
      best = std::max(best, std::pow(a[v], 1.0 / ws.q) * ws.sigma_at(static_cast<NodeId>(v)));
    return best;
  }
  double pp = p / (p - 1.0);
  std::vector<double> tail(n + 1, 0.0);  // sum_{u >= v} sigma(u)^p'
  for (std::size_t v = n; v-- > 0;)
    tail[v] = tail[v + 1] + std::pow(ws.sigma_at(static_cast<NodeId>(v)), pp);
  double best = 0.0;
  for (std::size_t v = 0; v < n; ++v)
    best = std::max(best, std::pow(a[v], 1.0 / ws.q) * std::pow(tail[v], 1.0 / pp));
  return best;
}

DyadicRounding dyadic_round(const WeightSystem& ws) {
  const std::size_t n = ws.sigma.size();
  DyadicRounding out;
  out.sigma_hat.resize(n);
  out.level_of.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = ws.sigma[i];  // normalized, in (0, 1]
    // Exact band search: m is the unique integer with 2^-m-1 < s <= 2^-m.
    // Comparisons against exact powers of two leave no fp ties to resolve.
    int m = std::max(0, static_cast<int>(std::floor(-std::log2(s))));
    while (std::exp2(static_cast<double>(-m)) < s) --m;
    while (std::exp2(static_cast<double>(-(m + 1))) >= s) ++m;
    if (m < 0) throw std::logic_error("dyadic_round: sigma above its root value");
    out.level_of[i] = m;
    out.sigma_hat[i] = std::exp2(static_cast<double>(-m));
  }
  for (std::size_t i = 1; i < n; ++i) {
    auto p = static_cast<std::size_t>(ws.tree->parent(static_cast<NodeId>(i)));
    if (out.level_of[i] < out.level_of[p])
      throw std::logic_error("dyadic_round: band index decreases along an edge");
  }
  return out;
}

std::pair<WeightLaw, WeightLaw> load_weight_table(std::istream& in, std::size_t node_count) {
  std::vector<double> alpha(node_count, 0.0), sigma(node_count, 0.0);
  std::vector<bool> seen(node_count, false);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    for (auto& ch : line)
      if (ch == ',') ch = ' ';
    std::istringstream ls(line);
    long long idx;
    double a, s;
    if (!(ls >> idx)) continue;
    if (!(ls >> a >> s)) {
      if (line.find_first_not_of(" \t") != std::string::npos && !std::isdigit(line[0]))
        continue;  // header
      throw std::invalid_argument("weight table: malformed line '" + line + "'");
    }
    if (idx < 0 || static_cast<std::size_t>(idx) >= node_count)
      throw std::invalid_argument("weight table: node index out of range");
    alpha[static_cast<std::size_t>(idx)] = a;
    sigma[static_cast<std::size_t>(idx)] = s;
    seen[static_cast<std::size_t>(idx)] = true;
  }
  for (std::size_t i = 0; i < node_count; ++i)
    if (!seen[i])
      throw std::invalid_argument("weight table: missing node " + std::to_string(i));
  return {WeightLaw::per_node(std::move(alpha)), WeightLaw::per_node(std::move(sigma))};
}

}  // namespace treesum
