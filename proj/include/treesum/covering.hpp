#pragma once

#include <optional>
#include <string>
#include <vector>

#include "treesum/metric.hpp"
#include "treesum/util.hpp"

namespace treesum {

enum class CoverKind { ball, order };

/// Witness for a covering claim. kind == ball: every node lies within d < eps
/// of some center. kind == order: every node t has a center s on its root
/// path with d(s,t) < eps.
struct CoverCertificate {
  CoverKind kind = CoverKind::ball;
  double epsilon = 0.0;
  std::vector<NodeId> centers;
  bool verified = false;
  std::string construction;  // optional tag: level_net | biased | ...
};

/// Witness for a separation claim: pairwise distances >= epsilon.
struct PackingCertificate {
  double epsilon = 0.0;
  std::vector<NodeId> points;
  double pairwise_min = 0.0;
  std::string construction;
};

/// Disjoint order intervals (t_i, s_i] with d(t_i, s_i) >= epsilon.
struct IntervalFamily {
  std::vector<std::pair<NodeId, NodeId>> intervals;
  double epsilon = 0.0;
};

struct CountRecord {
  double epsilon = 0.0;
  bool exact = false;
  long long lower = 0;  // equal when exact
  long long upper = 0;
  long long value() const { return upper; }
};

struct CoveringProfile {
  std::vector<double> eps_grid;
  std::vector<CountRecord> ball;
  std::vector<CountRecord> order;
  /// Bounds usable for rate fits: exact, or upper/lower within 10%.
  static bool usable(const CountRecord& r) {
    return r.exact || (r.lower > 0 && r.upper <= r.lower + (r.lower + 9) / 10);
  }
};

/// Per-candidate covered-node bitsets; candidate i is node i.
std::vector<Bitset> coverage_sets(const MetricEvaluator& me, double eps, CoverKind kind);

enum class CoverMode { exact, greedy };
inline constexpr std::size_t kExactCoverLimit = 512;

/// Minimum set cover over the given coverage sets. Exact mode runs
/// branch-and-bound (greedy incumbent, disjoint-packing lower bound) and is
/// limited to kExactCoverLimit candidates; greedy mode returns a valid cover.
std::vector<std::size_t> solve_min_cover(const std::vector<Bitset>& sets, CoverMode mode,
                                         std::size_t limit = kExactCoverLimit);

/// Exact minimal covering count with candidate centers = nodes.
long long exact_cover_count(const MetricEvaluator& me, double eps, CoverKind kind);
CoverCertificate exact_cover(const MetricEvaluator& me, double eps, CoverKind kind);

/// Deepest-first greedy order net; works on large trees without coverage
/// matrices. Among the chain of ancestors within eps of the current deepest
/// uncovered node, picks the one covering the most uncovered descendants
/// (ties toward the shallowest).
CoverCertificate greedy_order_net(const MetricEvaluator& me, double eps);

/// Greedy maximal eps-separated set in BFS order; maximality makes it an
/// eps-net as well.
PackingCertificate maximal_separated_set(const MetricEvaluator& me, double eps);

/// From a maximal 2eps-separated set, drops the at most one point within eps
/// of the root and turns each remaining point s into the deepest ancestor t
/// with d(t,s) >= eps; yields >= N(2eps) - 1 disjoint intervals.
IntervalFamily separated_to_intervals(const MetricEvaluator& me, double eps);

/// Rewrites a ball cover at eps into an order net at 2 eps of no larger size
/// by replacing each center s with the shallowest meet r ^ s over its ball.
CoverCertificate order_net_from_cover(const MetricEvaluator& me, const CoverCertificate& cert);

struct Verification {
  bool ok = true;
  std::vector<NodeId> violations;  // nodes (cover) or points (packing)
  double worst = 0.0;             // uncovered min distance / violating pair distance
};

Verification verify_certificate(const MetricEvaluator& me, const CoverCertificate& cert);
Verification verify_certificate(const MetricEvaluator& me, const PackingCertificate& cert);
Verification verify_family(const MetricEvaluator& me, const IntervalFamily& family);

/// Exact minimum over all distinct pairs. Uses brute force on small sets and
/// a meet-decomposition pass when sigma is constant.
double min_pairwise_distance(const MetricEvaluator& me, const std::vector<NodeId>& points);

/// Per-epsilon covering counts: exact below the candidate limit, otherwise
/// greedy upper bounds with packing lower bounds. Grid must decrease.
CoveringProfile covering_profile(const MetricEvaluator& me, const std::vector<double>& eps_grid,
                                 std::size_t exact_limit = kExactCoverLimit);

std::string certificate_to_json(const CoverCertificate& cert);
std::string certificate_to_json(const PackingCertificate& cert);
CoverCertificate cover_certificate_from_json(const std::string& text);
PackingCertificate packing_certificate_from_json(const std::string& text);

}  // namespace treesum
