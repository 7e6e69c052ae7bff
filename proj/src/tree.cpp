#include "treesum/tree.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace treesum {

Tree Tree::from_parents(std::vector<NodeId> parent, Kind kind, int biased_order) {
  const std::size_t n = parent.size();
  if (n == 0) throw std::invalid_argument("tree: empty node set");
  if (n > kMaxMaterializedNodes)
    throw std::invalid_argument("tree: node count " + std::to_string(n) +
                                " exceeds materialization cap " +
                                std::to_string(kMaxMaterializedNodes));
  if (parent[0] != kNoNode) throw std::invalid_argument("tree: node 0 must be the root");

  Tree t;
  t.kind_ = kind;
  t.biased_order_ = biased_order;
  t.parent_ = std::move(parent);
  t.depth_.assign(n, 0);
  t.child_offset_.assign(n + 1, 0);
  for (std::size_t i = 1; i < n; ++i) {
    NodeId p = t.parent_[i];
    if (p == kNoNode) throw std::invalid_argument("tree: multiple roots");
    if (p < 0 || static_cast<std::size_t>(p) >= i)
      throw std::invalid_argument("tree: node " + std::to_string(i) +
                                  " is not topologically numbered");
    t.depth_[i] = t.depth_[static_cast<std::size_t>(p)] + 1;
    ++t.child_offset_[static_cast<std::size_t>(p) + 1];
  }
  for (std::size_t i = 0; i < n; ++i) t.child_offset_[i + 1] += t.child_offset_[i];
  t.child_list_.assign(n - 1 ? n - 1 : 0, 0);
  {
    std::vector<std::int64_t> cursor(t.child_offset_.begin(), t.child_offset_.end() - 1);
    for (std::size_t i = 1; i < n; ++i) {
      auto p = static_cast<std::size_t>(t.parent_[i]);
      t.child_list_[static_cast<std::size_t>(cursor[p]++)] = static_cast<NodeId>(i);
    }
  }
  int maxd = 0;
  for (std::size_t i = 0; i < n; ++i) maxd = std::max(maxd, t.depth_[i]);
  t.levels_.assign(static_cast<std::size_t>(maxd) + 1, {});
  for (std::size_t i = 0; i < n; ++i)
    t.levels_[static_cast<std::size_t>(t.depth_[i])].push_back(static_cast<NodeId>(i));
  t.level_rank_.assign(n, 0);
  for (const auto& lvl : t.levels_)
    for (std::size_t r = 0; r < lvl.size(); ++r)
      t.level_rank_[static_cast<std::size_t>(lvl[r])] = static_cast<int>(r);
  return t;
}

std::vector<long long> Tree::generation_counts() const {
  std::vector<long long> r;
  r.reserve(levels_.size());
  for (const auto& lvl : levels_) r.push_back(static_cast<long long>(lvl.size()));
  return r;
}

void Tree::check_node(NodeId t) const {
  if (t < 0 || static_cast<std::size_t>(t) >= node_count())
    throw std::invalid_argument("tree: invalid node id " + std::to_string(t));
}

bool Tree::is_ancestor(NodeId t, NodeId s) const {
  check_node(t);
  check_node(s);
  while (depth(s) > depth(t)) s = parent(s);
  return s == t;
}

NodeId Tree::meet(NodeId t, NodeId s) const {
  check_node(t);
  check_node(s);
  while (depth(t) > depth(s)) t = parent(t);
  while (depth(s) > depth(t)) s = parent(s);
  while (t != s) {
    t = parent(t);
    s = parent(s);
  }
  return t;
}

std::vector<NodeId> Tree::ancestors(NodeId t) const {
  check_node(t);
  std::vector<NodeId> path(static_cast<std::size_t>(depth(t)) + 1);
  for (std::size_t i = path.size(); i-- > 0; t = parent(t)) path[i] = t;
  return path;
}

std::vector<NodeId> Tree::order_interval(NodeId t, NodeId s, bool half_open) const {
  check_node(t);
  check_node(s);
  if (!is_ancestor(t, s))
    throw std::invalid_argument("order_interval: endpoints are not comparable");
  std::vector<NodeId> path;
  NodeId cur = s;
  while (cur != t) {
    path.push_back(cur);
    cur = parent(cur);
  }
  if (!half_open) path.push_back(t);
  std::reverse(path.begin(), path.end());
  return path;
}

Tree build_path(int n_levels) {
  if (n_levels < 1) throw std::invalid_argument("build_path: need at least one level");
  std::vector<NodeId> parent(static_cast<std::size_t>(n_levels));
  parent[0] = kNoNode;
  for (int i = 1; i < n_levels; ++i) parent[static_cast<std::size_t>(i)] = i - 1;
  return Tree::from_parents(std::move(parent), Tree::Kind::path);
}

namespace {

// Layered tree: level n holds counts[n] nodes ordered right-to-left; the node
// of rank r at level n+1 hangs under rank min(r/2-style map) at level n.
Tree build_layered(const std::vector<long long>& counts, Tree::Kind kind, int order,
                   bool halving_parent) {
  long long total = 0;
  for (auto c : counts) total += c;
  if (total > static_cast<long long>(kMaxMaterializedNodes))
    throw std::invalid_argument("tree: node count " + std::to_string(total) +
                                " exceeds materialization cap " +
                                std::to_string(kMaxMaterializedNodes));
  std::vector<NodeId> parent(static_cast<std::size_t>(total));
  parent[0] = kNoNode;
  NodeId level_base = 0;
  for (std::size_t n = 1; n < counts.size(); ++n) {
    NodeId prev_base = level_base;
    level_base += static_cast<NodeId>(counts[n - 1]);
    for (long long r = 0; r < counts[n]; ++r) {
      long long pr = halving_parent ? r / 2 : std::min<long long>(r, counts[n - 1] - 1);
      parent[static_cast<std::size_t>(level_base + r)] = prev_base + static_cast<NodeId>(pr);
    }
  }
  return Tree::from_parents(std::move(parent), kind, order);
}

}  // namespace

Tree build_binary(int depth) {
  if (depth < 0) throw std::invalid_argument("build_binary: negative depth");
  if (depth > kMaxBinaryDepth)
    throw std::invalid_argument("build_binary: depth " + std::to_string(depth) +
                                " exceeds limit " + std::to_string(kMaxBinaryDepth));
  std::vector<long long> counts(static_cast<std::size_t>(depth) + 1);
  for (int n = 0; n <= depth; ++n) counts[static_cast<std::size_t>(n)] = 1LL << n;
  return build_layered(counts, Tree::Kind::binary, 0, /*halving_parent=*/true);
}

long long biased_generation(int order, int n) {
  if (order < 1) throw std::invalid_argument("biased tree: order must be positive");
  if (n <= 2 * order) return 1LL << n;
  long long r = 1;
  for (int i = 0; i < order; ++i) r *= n;
  return r;
}

Tree build_biased(int order, int depth) {
  if (order < 1) throw std::invalid_argument("build_biased: order must be positive");
  if (depth < 1) throw std::invalid_argument("build_biased: depth must be positive");
  std::vector<long long> counts(static_cast<std::size_t>(depth) + 1);
  for (int n = 0; n <= depth; ++n) counts[static_cast<std::size_t>(n)] = biased_generation(order, n);
  // Keeping the R(n) rightmost binary strings per level: the children of the
  // kept nodes are the 2 R(n) rightmost strings of the next level, in rank
  // order, so rank r at level n+1 hangs under rank r/2. R(n+1) <= 2 R(n)
  // guarantees closure under parents.
  for (int n = 0; n < depth; ++n)
    if (counts[static_cast<std::size_t>(n) + 1] > 2 * counts[static_cast<std::size_t>(n)])
      throw std::logic_error("build_biased: generation growth violates the doubling bound");
  return build_layered(counts, Tree::Kind::biased, order, /*halving_parent=*/true);
}

Tree build_moderate(int order, int depth) {
  if (order < 0) throw std::invalid_argument("build_moderate: negative order");
  if (depth < 0) throw std::invalid_argument("build_moderate: negative depth");
  std::vector<long long> counts(static_cast<std::size_t>(depth) + 1);
  for (int n = 0; n <= depth; ++n) {
    double v = std::pow(static_cast<double>(n), static_cast<double>(order));
    counts[static_cast<std::size_t>(n)] = std::max<long long>(1, std::llround(v));
  }
  return build_layered(counts, Tree::Kind::moderate, order, /*halving_parent=*/false);
}

Tree load_edge_list(std::istream& in) {
  std::vector<std::pair<long long, long long>> edges;
  std::string line;
  long long max_index = 0;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    long long child, parent;
    if (!(ls >> child)) continue;  // blank line
    if (!(ls >> parent))
      throw std::invalid_argument("edge list: malformed line '" + line + "'");
    if (child <= 0 || parent < 0)
      throw std::invalid_argument("edge list: indices must be positive children of >= 0 parents");
    if (parent >= child)
      throw std::invalid_argument("edge list: not topologically numbered at child " +
                                  std::to_string(child));
    edges.emplace_back(child, parent);
    max_index = std::max(max_index, child);
  }
  std::vector<NodeId> parent(static_cast<std::size_t>(max_index) + 1, kNoNode);
  for (auto [c, p] : edges) {
    if (parent[static_cast<std::size_t>(c)] != kNoNode)
      throw std::invalid_argument("edge list: duplicate parent for node " + std::to_string(c));
    parent[static_cast<std::size_t>(c)] = static_cast<NodeId>(p);
  }
  for (long long i = 1; i <= max_index; ++i)
    if (parent[static_cast<std::size_t>(i)] == kNoNode)
      throw std::invalid_argument("edge list: not parent-closed, node " + std::to_string(i) +
                                  " has no parent");
  return Tree::from_parents(std::move(parent), Tree::Kind::custom);
}

Tree load_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open edge list file: " + path);
  return load_edge_list(in);
}

void save_edge_list(const Tree& tree, std::ostream& out) {
  for (std::size_t i = 1; i < tree.node_count(); ++i)
    out << i << ' ' << tree.parent(static_cast<NodeId>(i)) << '\n';
}

}  // namespace treesum
