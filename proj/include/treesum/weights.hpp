#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "treesum/tree.hpp"

namespace treesum {

/// Weight assignment rule. Polynomial and exponential laws depend on the
/// target exponent q: value(t) = c * max(1,|t|)^(-gamma/q) respectively
/// c * 2^(-gamma |t| / q). The max(1,.) guard gives the root a finite value;
/// it shifts constants but not rates.
struct WeightLaw {
  enum class Kind { constant, polynomial, exponential, per_level, per_node };
  Kind kind = Kind::constant;
  double c = 1.0;
  double gamma = 0.0;
  std::vector<double> table;  // per level or per node

  static WeightLaw constant(double c);
  static WeightLaw polynomial(double gamma, double c = 1.0);
  static WeightLaw exponential(double gamma, double c = 1.0);
  static WeightLaw per_level(std::vector<double> values);
  static WeightLaw per_node(std::vector<double> values);

  double value(int depth, NodeId node, double q) const;
};

/// Per-node weights (alpha, sigma) with sigma non-increasing along root
/// paths. sigma is stored normalized to sigma(root) = 1; the original root
/// value is kept in sigma_scale and reapplied by sigma_at / metric values.
struct WeightSystem {
  const Tree* tree = nullptr;
  double q = 2.0;
  std::vector<double> alpha;
  std::vector<double> sigma;  // normalized, sigma[0] == 1
  double sigma_scale = 1.0;
  double bound_stat = 0.0;  // recorded at construction

  double alpha_at(NodeId t) const { return alpha[static_cast<std::size_t>(t)]; }
  double sigma_at(NodeId t) const { return sigma_scale * sigma[static_cast<std::size_t>(t)]; }

  /// Prefix sums A(t) = sum_{r on root path of t} alpha(r)^q.
  std::vector<double> alpha_pow_prefix() const;
  /// Same with exponent 2 (Gaussian covariances).
  std::vector<double> alpha_sq_prefix() const;
};

WeightSystem assign(const Tree& tree, const WeightLaw& alpha_law, const WeightLaw& sigma_law,
                    double q);
WeightSystem assign_values(const Tree& tree, std::vector<double> alpha, std::vector<double> sigma,
                           double q);

/// sup_s (sum_{r <= s} alpha(r)^q)^(1/q) * sigma(s); equals the l1 -> lq
/// operator norm of the weighted summation operator.
double boundedness_statistic(const WeightSystem& ws);

/// sup_v ||alpha 1_[0,v]||_q * ||sigma 1_[v,end)||_{p'} on a path tree,
/// p' = p/(p-1) with p = 1 meaning the sup norm.
double mazya_rosin_statistic(const WeightSystem& ws, double p);

struct DyadicRounding {
  std::vector<double> sigma_hat;  // normalized like WeightSystem::sigma
  std::vector<int> level_of;     // m(t): sigma_hat = 2^-m
};

/// Rounds sigma up to powers of two: sigma(t) <= sigma_hat(t) <= 2 sigma(t),
/// binary-exact. Bands are the half-open intervals (2^-m-1, 2^-m].
DyadicRounding dyadic_round(const WeightSystem& ws);

/// CSV rows "node_index,alpha,sigma"; header line optional.
std::pair<WeightLaw, WeightLaw> load_weight_table(std::istream& in, std::size_t node_count);

}  // namespace treesum
