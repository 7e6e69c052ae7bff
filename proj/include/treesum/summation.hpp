#pragma once

#include <utility>
#include <vector>

#include "treesum/covering.hpp"
#include "treesum/metric.hpp"

namespace treesum {

/// Sparse vector indexed by nodes, entries sorted by node id.
using SparseVec = std::vector<std::pair<NodeId, double>>;

double norm_q(const SparseVec& v, double q);
double norm_1(const SparseVec& v);
double dist_q(const SparseVec& a, const SparseVec& b, double q);
double dot(const SparseVec& a, const SparseVec& b);

/// The weighted summation operator x -> (t -> alpha(t) sum_{s >= t} sigma(s) x(s))
/// as a sparse map l1(T) -> lq(T). Column t is sigma(t) * sum_{r <= t} alpha(r) delta_r,
/// supported on the root path of t.
class OperatorBundle {
 public:
  OperatorBundle(const Tree& tree, const WeightSystem& ws);

  const Tree& tree() const { return *tree_; }
  const WeightSystem& weights() const { return *ws_; }
  double q() const { return ws_->q; }

  SparseVec column(NodeId t) const;
  double column_norm(NodeId t) const;  // sigma(t) A(t)^(1/q)
  SparseVec apply(const SparseVec& x) const;

  /// max column q-norm; equals the boundedness statistic.
  double operator_norm() const;

 private:
  const Tree* tree_;
  const WeightSystem* ws_;
  std::vector<double> prefix_;  // alpha^q partial sums along root paths
};

/// sigma rounded to powers of two splits the operator into
/// V = W o Z o Delta: W sums within one dyadic band, Z redistributes mass to
/// band endpoints with l1 norm at most 2, Delta = diag(sigma/sigma_hat).
class DyadicFactorization {
 public:
  DyadicFactorization(const OperatorBundle& op);

  const std::vector<double>& sigma_hat() const { return sigma_hat_; }  // includes the scale
  const std::vector<int>& band() const { return band_; }
  double delta(NodeId t) const;  // diagonal entries, in (1/2, 1]

  /// Band intervals [lambda_k, theta_k] of the root path of t, deepest last.
  struct BandInterval {
    int band;
    NodeId lambda, theta;
  };
  std::vector<BandInterval> path_bands(NodeId t) const;

  SparseVec w_column(NodeId t) const;
  SparseVec z_column(NodeId t) const;  // entries 2^(k-m) at theta_k
  double z_column_norm1(NodeId t) const;

  /// Column of W o Z o Delta; equals the original column exactly.
  SparseVec composed_column(NodeId t) const;
  /// Max relative q-distance between composed and original columns.
  double factorization_residual() const;

  /// A weight system with sigma replaced by sigma_hat (same tree and q).
  WeightSystem rounded_weights() const;

  const OperatorBundle& op() const { return *op_; }

 private:
  const OperatorBundle* op_;
  std::vector<double> sigma_hat_;
  std::vector<int> band_;
};

/// Deduplicated W columns and their minimal covering count under the lq norm
/// with centers from the points plus the origin; exact up to the candidate cap.
struct WPointCover {
  std::size_t point_count = 0;
  long long cover_count = 0;
};
WPointCover cover_w_points(const DyadicFactorization& fact, double eps,
                           std::size_t exact_limit = kExactCoverLimit);

/// Identity block inscribed into the operator along disjoint order intervals:
/// y_i = delta_{v_i} - (sigma(v_i)/sigma(t_i)) delta_{t_i} with v_i the
/// distance-attaining node, z_i = V y_i supported on (t_i, v_i], and dual
/// vectors b_i with unit q'-norm. The matrix <z_j, b_i> is diagonal with
/// entries >= epsilon.
struct Inscription {
  std::vector<std::pair<NodeId, NodeId>> intervals;  // (t_i, s_i]
  std::vector<NodeId> maximizers;                    // v_i
  std::vector<SparseVec> y;                          // l1 elements, norm <= 2
  std::vector<SparseVec> z;                          // images, disjoint supports
  std::vector<SparseVec> b;                          // dual, ||b_i||_q' = 1
  std::vector<double> diagonal;                      // <z_i, b_i> >= epsilon
  double epsilon = 0.0;
  double q = 2.0;

  std::size_t size() const { return intervals.size(); }
  /// <z, b_i> for all i; a non-expansive map into lq^m.
  std::vector<double> project(const SparseVec& zv) const;
  double project_norm(const SparseVec& zv) const;  // lq norm of project(zv)
};

Inscription inscribe_identity(const OperatorBundle& op, const IntervalFamily& family,
                              const Verification& family_check);
Inscription inscribe_identity(const OperatorBundle& op, const IntervalFamily& family);

/// Two-sided bracket for the entropy numbers e_n of the operator on trees of
/// up to 12 nodes. n = 1 is exact (max column norm); larger n combine a
/// farthest-point cover of a coefficient-grid discretization (upper, with the
/// grid error added) and packings of hull points (lower).
struct EntropyBracket {
  double lower = 0.0;
  double upper = 0.0;
  double grid_step = 0.0;
  double grid_error = 0.0;  // additive part of the upper bound
};
EntropyBracket entropy_bracket(const OperatorBundle& op, int n, double grid_step = 0.125);

/// (log(1 + m/n) / n)^(1/q') for log m <= n <= m; reporting shape of the
/// classical identity-operator entropy lower bound, constants not claimed.
double schuett_shape(long long m, long long n, double q);

}  // namespace treesum
