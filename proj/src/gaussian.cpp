#include "treesum/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <stdexcept>

#include "treesum/util.hpp"

namespace treesum {

namespace {

void require_q2(const WeightSystem& ws) {
  if (!nearly_equal(ws.q, 2.0, 1e-12))
    throw std::domain_error("gaussian field: only q = 2 is meaningful here");
}

double one_sup(const Tree& tree, const WeightSystem& ws, std::uint64_t seed,
               std::vector<double>& partial) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  double sup = 0.0;
  for (std::size_t t = 0; t < tree.node_count(); ++t) {
    double xi = normal(rng);
    double s = ws.alpha[t] * xi;
    if (t > 0) s += partial[static_cast<std::size_t>(tree.parent(static_cast<NodeId>(t)))];
    partial[t] = s;
    double x = std::abs(ws.sigma_at(static_cast<NodeId>(t)) * s);
    if (x > sup) sup = x;
  }
  return sup;
}

}  // namespace

std::vector<double> sample_sup(const GaussianRun& run, int threads) {
  require_q2(*run.ws);
  if (run.n_samples <= 0) throw std::invalid_argument("sample_sup: need n_samples > 0");
  const Tree& tree = *run.tree;
  const WeightSystem& ws = *run.ws;
  std::vector<double> sups(static_cast<std::size_t>(run.n_samples));
  if (threads <= 0) threads = default_thread_count();
  std::vector<std::vector<double>> scratch(static_cast<std::size_t>(threads),
                                           std::vector<double>(tree.node_count()));
  std::size_t nthreads = static_cast<std::size_t>(threads);
  parallel_for(
      static_cast<std::size_t>(run.n_samples),
      [&](std::size_t i) {
        auto& partial = scratch[i % nthreads];
        sups[i] = one_sup(tree, ws, derive_seed(run.seed, i), partial);
      },
      threads);
  return sups;
}

double covariance(const Tree& tree, const WeightSystem& ws, NodeId t, NodeId s) {
  auto a2 = ws.alpha_sq_prefix();
  NodeId m = tree.meet(t, s);
  return ws.sigma_at(t) * ws.sigma_at(s) * a2[static_cast<std::size_t>(m)];
}

SmallDevEstimate small_deviation_from_sups(const std::vector<double>& sups,
                                           const std::vector<double>& eps_grid) {
  SmallDevEstimate est;
  est.n_samples = static_cast<long long>(sups.size());
  const auto n = static_cast<double>(sups.size());
  for (double eps : eps_grid) {
    SmallDevPoint pt;
    pt.epsilon = eps;
    for (double s : sups)
      if (s < eps) ++pt.successes;
    pt.p_hat = static_cast<double>(pt.successes) / n;
    auto ci = wilson_interval(pt.successes, est.n_samples);
    pt.ci_lo = ci.lo;
    pt.ci_hi = ci.hi;
    pt.minus_log_p = pt.successes > 0 ? -std::log(pt.p_hat) : 0.0;
    pt.usable = pt.successes >= 30 && pt.p_hat < 1.0;
    est.points.push_back(pt);
  }
  // p_hat computed from one sample set is monotone in eps by construction;
  // guard against grid mishandling anyway.
  for (std::size_t i = 1; i < est.points.size(); ++i)
    if (est.points[i].epsilon < est.points[i - 1].epsilon &&
        est.points[i].p_hat > est.points[i - 1].p_hat)
      throw std::logic_error("small_deviation: success rate increased as eps shrank");
  return est;
}

SmallDevEstimate small_deviation(const GaussianRun& run, int threads) {
  return small_deviation_from_sups(sample_sup(run, threads), run.eps_grid);
}

void write_small_deviation_csv(const SmallDevEstimate& est, std::ostream& out) {
  out << "epsilon,p_hat,ci_lo,ci_hi,minus_log_p,flag\n";
  for (const auto& pt : est.points)
    out << pt.epsilon << ',' << pt.p_hat << ',' << pt.ci_lo << ',' << pt.ci_hi << ','
        << pt.minus_log_p << ',' << (pt.usable ? "ok" : "unusable") << '\n';
}

std::vector<CovarianceCheck> covariance_check(const Tree& tree, const WeightSystem& ws,
                                              std::uint64_t seed, long long n_samples,
                                              const std::vector<std::pair<NodeId, NodeId>>& pairs) {
  require_q2(ws);
  auto a2 = ws.alpha_sq_prefix();
  std::vector<double> sum_prod(pairs.size(), 0.0), sum_prod_sq(pairs.size(), 0.0);
  std::vector<double> partial(tree.node_count());
  std::mt19937_64 rng;
  std::normal_distribution<double> normal;
  for (long long i = 0; i < n_samples; ++i) {
    rng.seed(derive_seed(seed, static_cast<std::uint64_t>(i)));
    for (std::size_t t = 0; t < tree.node_count(); ++t) {
      double xi = normal(rng);
      double s = ws.alpha[t] * xi;
      if (t > 0) s += partial[static_cast<std::size_t>(tree.parent(static_cast<NodeId>(t)))];
      partial[t] = s;
    }
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      double xt = ws.sigma_at(pairs[p].first) * partial[static_cast<std::size_t>(pairs[p].first)];
      double xs = ws.sigma_at(pairs[p].second) * partial[static_cast<std::size_t>(pairs[p].second)];
      sum_prod[p] += xt * xs;
      sum_prod_sq[p] += xt * xs * xt * xs;
    }
  }
  std::vector<CovarianceCheck> out;
  const auto n = static_cast<double>(n_samples);
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    CovarianceCheck c;
    c.t = pairs[p].first;
    c.s = pairs[p].second;
    NodeId m = tree.meet(c.t, c.s);
    c.closed_form = ws.sigma_at(c.t) * ws.sigma_at(c.s) * a2[static_cast<std::size_t>(m)];
    c.empirical = sum_prod[p] / n;
    double var = std::max(0.0, sum_prod_sq[p] / n - c.empirical * c.empirical);
    c.std_error = std::sqrt(var / n);
    c.sigmas_off = c.std_error > 0 ? std::abs(c.empirical - c.closed_form) / c.std_error : 0.0;
    out.push_back(c);
  }
  return out;
}

}  // namespace treesum
