#pragma once

#include <optional>
#include <string>
#include <vector>

#include "treesum/covering.hpp"
#include "treesum/metric.hpp"

namespace treesum {

/// Net of (N, dbar) built from the decay profile: the full prefix
/// M = {n >= 1 : phi(n) >= eps} plus thinned points u_k ~ floor(Phi^-1(k eps)).
/// The union is a 2 eps net of the positive integers.
struct LevelNet {
  double epsilon = 0.0;
  std::vector<long long> m_levels;   // the prefix M
  std::vector<double> u_tilde;       // Phi^-1(k eps), k = 1..N
  std::vector<long long> u;          // rounded, u[N-1] patched upward if needed
  long long count() const;
  std::vector<long long> levels() const;  // sorted union
};

LevelNet level_net(const DecayProfile& profile, double eps);

/// Scan check that every n in [1, horizon] sees a net level w <= n with
/// dbar(w, n) < 2 eps; the tail beyond the top net level is covered exactly
/// when Phi(top) < 2 eps, which the scan also reports.
struct LevelNetCheck {
  bool ok = true;
  long long first_violation = -1;
  bool tail_ok = true;
};
LevelNetCheck check_level_net(const DecayProfile& profile, const LevelNet& net,
                              long long horizon = 0);

/// Lifts the level net at eps^q to the tree: root plus every node whose depth
/// lies in the net. Requires (alpha sigma)^q <= phi(depth) pointwise (checked;
/// throws with a witness node) and yields an order net at 2^(1/q) eps.
CoverCertificate tree_net_from_levels(const MetricEvaluator& me, const DecayProfile& profile,
                                      double eps);

/// Level-count majorant rho used by the closed-form net size bounds.
struct GrowthLaw {
  enum class Kind { constant, polynomial, binary };
  Kind kind = Kind::constant;
  double c = 1.0;
  double order = 0.0;  // rho(x) = c * max(1,x)^order for polynomial
  static GrowthLaw constant(double c = 1.0);
  static GrowthLaw polynomial(double order, double c = 1.0);
  static GrowthLaw binary();
  double value(double x) const;
  /// int_a^b rho, closed form.
  double integral(double a, double b) const;
};

enum class NetBoundVariant { base, convergent, divergent };

/// Three-term size bound for order nets built from level nets:
/// int_0^{phi^-1(e)+1} rho + rho(Phi^-1(e)) + 2 eps^-q int rho phi with
/// e = eps^q / 2. The integral limits are [phi^-1(e), Phi^-1(e)] for the base
/// variant, [phi^-1(e), inf) when int rho phi converges, [1, Phi^-1(e)] when
/// it diverges. Requesting the convergent variant with a divergent integrand
/// is an error.
double radial_net_size_bound(const GrowthLaw& rho, const DecayProfile& profile, double q,
                             double eps, NetBoundVariant variant = NetBoundVariant::base);

/// Order net on a biased tree: all of the first n_J - 1 levels plus, per
/// threshold level n_j, the nu_j rightmost nodes. Verified at 2^(1/q) eps.
struct BiasedNetSpec {
  int order = 1;  // the tree's bias order
  double gamma = 2.0, q = 2.0, epsilon = 0.0, c_star = 8.0;
  long long j_count = 0;                 // J
  std::vector<long long> n_levels;       // n_j, j = 1..J+1 (last used by the
                                         // structural check only)
  std::vector<long long> nu;             // nu_j, j = 1..J+1
  long long s1_size = 0;
  long long net_size = 0;
  double size_ratio = 0.0;  // net_size / eps^{-q(order+1)/gamma}
  bool structure_ok = false;  // every node of depth >= n_j has an ancestor
                              // among the nu_{j+1} rightmost of level n_{j+1}
};

struct BiasedNetResult {
  BiasedNetSpec spec;
  CoverCertificate certificate;
};

/// Requires alpha(t) = max(1,|t|)^(-gamma/q), sigma constant, biased tree.
BiasedNetResult biased_tree_net(const MetricEvaluator& me, double gamma, double eps,
                                double c_star);

/// Doubles c_star (up to the cap) until certificate and structural check pass.
BiasedNetResult biased_tree_net_auto(const MetricEvaluator& me, double gamma, double eps,
                                     double c_star_start = 8.0, int max_doublings = 10);

/// All nodes of depth <= phi^-1(eps^q) form an eps-separated set when
/// (alpha sigma)^q >= phi(depth) for every non-root node (checked; throws
/// with a witness). Reports the integral lower bound for a given rho.
struct TruncationPacking {
  PackingCertificate certificate;
  long long cutoff_level = 0;
  double rho_integral = 0.0;  // int_1^{phi^-1(eps^q)-1} rho
};
TruncationPacking truncation_packing(const MetricEvaluator& me, const DecayProfile& profile,
                                     double eps, const GrowthLaw& rho);

/// Separated set for fertile trees (every node has a child up to the working
/// depth), constant sigma: pick levels v_k = floor(Phi^-1(3k eps^q)) + 1 and
/// for each node of level v_k one descendant at level v_{k-1}.
struct SpacedLevelPacking {
  PackingCertificate certificate;
  std::vector<long long> v_levels;  // v_1 > v_2 > ... > v_m
  long long m = 0;
  bool count_bound_held = false;  // m >= Phi(phi^-1(eps^q)) / (4 eps^q)
  double integral_lower = 0.0;    // 4^-1 eps^-q int_{phi^-1(eps^q)}^{Phi^-1(8 eps^q)} rho phi
};
SpacedLevelPacking spaced_level_packing(const MetricEvaluator& me, const DecayProfile& profile,
                                        double eps, const GrowthLaw& rho);

/// Log2 covering bounds for the infinite binary tree with
/// alpha = max(1,|t|)^(-gamma/q), sigma = 1, computed from level arithmetic
/// only. upper: log2 of the tree net size at radius 2^(1/q) eps;
/// lower: log2 of the spaced-level packing size (separated at eps, empty when
/// the construction needs more than the available thinned levels).
struct BinaryLogCounts {
  std::vector<double> eps;
  std::vector<double> log2_upper;
  std::vector<double> log2_lower;  // NaN where the packing is empty
  std::vector<long long> top_net_level;
};
BinaryLogCounts binary_log_counts(double gamma, double q, const std::vector<double>& eps_grid);

}  // namespace treesum
