#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "treesum/weights.hpp"

namespace treesum {

/// Monte Carlo study of the Gaussian field
/// X_t = sigma(t) * sum_{r <= t} alpha(r) xi_r with iid standard normal xi.
/// Requires q = 2 (the field corresponds to the l1 -> l2 operator).
/// Reproducible: sample i draws from a stream seeded by (seed, i), so the
/// result does not depend on how samples are split across threads.
struct GaussianRun {
  const Tree* tree = nullptr;
  const WeightSystem* ws = nullptr;
  std::uint64_t seed = 1;
  long long n_samples = 0;
  std::vector<double> eps_grid;
};

/// One sup |X_t| per sample.
std::vector<double> sample_sup(const GaussianRun& run, int threads = 0);

/// Closed-form covariance sigma(t) sigma(s) sum_{r <= t^s} alpha(r)^2.
double covariance(const Tree& tree, const WeightSystem& ws, NodeId t, NodeId s);

struct SmallDevPoint {
  double epsilon = 0.0;
  long long successes = 0;
  double p_hat = 0.0;
  double ci_lo = 0.0, ci_hi = 0.0;
  double minus_log_p = 0.0;
  bool usable = false;  // at least 30 successes and p_hat < 1
};

struct SmallDevEstimate {
  std::vector<SmallDevPoint> points;
  long long n_samples = 0;
};

SmallDevEstimate small_deviation(const GaussianRun& run, int threads = 0);
SmallDevEstimate small_deviation_from_sups(const std::vector<double>& sups,
                                           const std::vector<double>& eps_grid);

void write_small_deviation_csv(const SmallDevEstimate& est, std::ostream& out);

struct CovarianceCheck {
  NodeId t = 0, s = 0;
  double closed_form = 0.0;
  double empirical = 0.0;
  double std_error = 0.0;
  double sigmas_off = 0.0;
};

/// Empirical vs closed-form covariance on the given node pairs.
std::vector<CovarianceCheck> covariance_check(const Tree& tree, const WeightSystem& ws,
                                              std::uint64_t seed, long long n_samples,
                                              const std::vector<std::pair<NodeId, NodeId>>& pairs);

}  // namespace treesum
