#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace treesum {

using NodeId = std::int32_t;
inline constexpr NodeId kNoNode = -1;

/// Finite rooted tree with topological (parent-before-child) numbering.
/// Node 0 is the root. Immutable after construction; concurrent reads are safe.
class Tree {
 public:
  enum class Kind { path, binary, moderate, biased, custom };

  static Tree from_parents(std::vector<NodeId> parent, Kind kind = Kind::custom,
                           int biased_order = 0);

  Kind kind() const { return kind_; }
  int biased_order() const { return biased_order_; }

  std::size_t node_count() const { return parent_.size(); }
  NodeId parent(NodeId t) const { return parent_[static_cast<std::size_t>(t)]; }
  int depth(NodeId t) const { return depth_[static_cast<std::size_t>(t)]; }
  int max_depth() const { return static_cast<int>(levels_.size()) - 1; }

  std::span<const NodeId> children(NodeId t) const {
    auto b = child_offset_[static_cast<std::size_t>(t)];
    auto e = child_offset_[static_cast<std::size_t>(t) + 1];
    return {child_list_.data() + b, child_list_.data() + e};
  }
  std::size_t child_count(NodeId t) const { return children(t).size(); }

  /// Nodes of depth n. For the layered builders (path/binary/biased/moderate)
  /// the list is ordered right-to-left, so rank 0 is the rightmost node.
  const std::vector<NodeId>& level(int n) const { return levels_[static_cast<std::size_t>(n)]; }
  /// Rank of t within its level, 0 = rightmost for layered builders.
  int level_rank(NodeId t) const { return level_rank_[static_cast<std::size_t>(t)]; }

  /// Generation sizes R(0), R(1), ...
  std::vector<long long> generation_counts() const;

  bool is_ancestor(NodeId t, NodeId s) const;  // t on the root path of s (t == s counts)
  bool is_comparable(NodeId t, NodeId s) const { return is_ancestor(t, s) || is_ancestor(s, t); }
  NodeId meet(NodeId t, NodeId s) const;  // deepest common ancestor

  /// Root path of t, root first, t last.
  std::vector<NodeId> ancestors(NodeId t) const;

  /// Order interval [t, s] (or (t, s] when half_open) in root-to-leaf order.
  /// Throws if t is not an ancestor of s.
  std::vector<NodeId> order_interval(NodeId t, NodeId s, bool half_open = false) const;

  void check_node(NodeId t) const;

 private:
  Kind kind_ = Kind::custom;
  int biased_order_ = 0;
  std::vector<NodeId> parent_;
  std::vector<int> depth_;
  std::vector<std::int64_t> child_offset_;
  std::vector<NodeId> child_list_;
  std::vector<std::vector<NodeId>> levels_;
  std::vector<int> level_rank_;
};

/// Node budget for materialized trees; deep experiments use level arithmetic
/// instead of building bigger trees.
inline constexpr std::size_t kMaxMaterializedNodes = std::size_t{1} << 24;
inline constexpr int kMaxBinaryDepth = 24;

Tree build_path(int n_levels);
Tree build_binary(int depth);
/// Subtree of the full binary tree keeping per level the R(n) rightmost nodes,
/// R(n) = 2^n for n <= 2*order and n^order beyond.
Tree build_biased(int order, int depth);
/// Layered tree with R(n) = max(1, round(n^order)) and every node fertile.
Tree build_moderate(int order, int depth);

/// Generation sizes of the (possibly unmaterialized) biased tree.
long long biased_generation(int order, int n);

/// Edge list format: one "child_index parent_index" pair per line, root
/// implicit as index 0. Rejects inputs that are not topologically numbered
/// or not parent-closed.
Tree load_edge_list(std::istream& in);
Tree load_edge_list_file(const std::string& path);
void save_edge_list(const Tree& tree, std::ostream& out);

}  // namespace treesum
