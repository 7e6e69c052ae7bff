#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "treesum/weights.hpp"

namespace treesum {

/// Evaluates the tree distance induced by (alpha, sigma, q):
/// for t below s, d(t,s) = max over v in (t,s] of
/// (sum_{t < r <= v} alpha(r)^q)^(1/q) * sigma(v), extended by symmetry and
/// by d(t,s) = d(t^s, t) + d(t^s, s) across incomparable pairs.
/// Pure queries; safe to call concurrently.
class MetricEvaluator {
 public:
  MetricEvaluator(const Tree& tree, const WeightSystem& ws);

  const Tree& tree() const { return *tree_; }
  const WeightSystem& weights() const { return *ws_; }
  double q() const { return ws_->q; }

  /// A(t) = sum over the root path of t of alpha^q, root included.
  double prefix(NodeId t) const { return prefix_[static_cast<std::size_t>(t)]; }
  const std::vector<double>& prefix() const { return prefix_; }

  double dist(NodeId t, NodeId s) const;
  /// Requires t an ancestor of s.
  double dist_comparable(NodeId t, NodeId s) const;

  /// Distance contribution of a single path step, given the running maximum
  /// from anchor a to parent(t): max(run, (A(t)-A(a))^(1/q) sigma(t)).
  double extend_run(double run, NodeId anchor, NodeId t) const;

  double diameter_upper() const;  // max_t d(root, t); bounds d by triangle

 private:
  const Tree* tree_;
  const WeightSystem* ws_;
  std::vector<double> prefix_;
};

/// Radial decay majorant phi with tail integral Phi(y) = int_y^inf phi.
/// Closed forms for polynomial c*x^-gamma and exponential c*2^-gamma*x;
/// numeric profiles invert by bisection.
class DecayProfile {
 public:
  enum class Form { polynomial, exponential, numeric };

  static DecayProfile polynomial(double gamma, double c = 1.0);
  static DecayProfile exponential(double gamma, double c = 1.0);
  static DecayProfile numeric(std::function<double(double)> phi,
                              std::function<double(double)> tail,
                              std::optional<double> kappa = std::nullopt, double x0 = 1.0);

  Form form() const { return form_; }
  double gamma() const { return gamma_; }
  double scale() const { return c_; }

  double phi(double x) const;
  double tail(double y) const;  // Phi(y); Phi(inf) = 0
  double phi_inv(double y) const;
  double tail_inv(double z) const;

  /// Whether phi(x) <= kappa * phi(2x) holds for x >= x0.
  bool has_doubling() const;
  std::optional<double> doubling_constant() const { return kappa_; }
  double doubling_from() const { return x0_; }

 private:
  Form form_ = Form::polynomial;
  double c_ = 1.0, gamma_ = 2.0;
  std::function<double(double)> phi_fn_, tail_fn_;
  std::optional<double> kappa_;
  double x0_ = 1.0;
};

/// dbar(y1, y2) = Phi(y1) - Phi(y2) = int_{y1}^{y2} phi; y2 may be infinite.
double dbar(const DecayProfile& profile, double y1, double y2);

/// Level-indexed weights for trees whose alpha and sigma depend on the depth
/// only. Distances between levels then need no materialized nodes.
struct LevelWeights {
  double q = 2.0;
  std::vector<double> alpha;  // alpha at depth n
  std::vector<double> sigma;
};

/// Extracts level weights; throws std::domain_error if two nodes of equal
/// depth carry different weights.
LevelWeights level_weights(const Tree& tree, const WeightSystem& ws);

/// max over n1 < v <= n2 of (sum_{n1 < k <= v} alpha_k^q)^(1/q) sigma_v.
double radial_dist(const LevelWeights& lw, int n1, int n2);

}  // namespace treesum
