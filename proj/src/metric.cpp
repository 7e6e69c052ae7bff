#include "treesum/metric.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "treesum/util.hpp"

namespace treesum {

MetricEvaluator::MetricEvaluator(const Tree& tree, const WeightSystem& ws)
    : tree_(&tree), ws_(&ws) {
  if (ws.tree != &tree) throw std::invalid_argument("metric: weights built for another tree");
  prefix_ = ws.alpha_pow_prefix();
}

double MetricEvaluator::extend_run(double run, NodeId anchor, NodeId t) const {
  double inc = std::pow(prefix(t) - prefix(anchor), 1.0 / ws_->q) * ws_->sigma_at(t);
  return inc > run ? inc : run;
}

double MetricEvaluator::dist_comparable(NodeId t, NodeId s) const {
  double at = prefix(t);
  double best = 0.0;
  const double q = ws_->q;
  for (NodeId v = s; v != t; v = tree_->parent(v)) {
    double val = std::pow(prefix(v) - at, 1.0 / q) * ws_->sigma_at(v);
    if (val > best) best = val;
  }
  return best;
}

double MetricEvaluator::dist(NodeId t, NodeId s) const {
  if (t == s) return 0.0;
  NodeId m = tree_->meet(t, s);
  if (m == t) return dist_comparable(t, s);
  if (m == s) return dist_comparable(s, t);
  return dist_comparable(m, t) + dist_comparable(m, s);
}

double MetricEvaluator::diameter_upper() const {
  double best = 0.0;
  std::vector<double> run(tree_->node_count(), 0.0);
  for (std::size_t i = 1; i < tree_->node_count(); ++i) {
    auto t = static_cast<NodeId>(i);
    run[i] = extend_run(run[static_cast<std::size_t>(tree_->parent(t))], 0, t);
    if (run[i] > best) best = run[i];
  }
  return 2.0 * best;
}

DecayProfile DecayProfile::polynomial(double gamma, double c) {
  if (!(gamma > 1.0)) throw std::invalid_argument("decay profile: polynomial needs gamma > 1");
  if (!(c > 0)) throw std::invalid_argument("decay profile: scale must be positive");
  DecayProfile p;
  p.form_ = Form::polynomial;
  p.gamma_ = gamma;
  p.c_ = c;
  p.kappa_ = std::exp2(gamma);  // phi(x)/phi(2x) = 2^gamma for all x
  p.x0_ = 0.0;
  return p;
}

DecayProfile DecayProfile::exponential(double gamma, double c) {
  if (!(gamma > 0.0)) throw std::invalid_argument("decay profile: exponential needs gamma > 0");
  if (!(c > 0)) throw std::invalid_argument("decay profile: scale must be positive");
  DecayProfile p;
  p.form_ = Form::exponential;
  p.gamma_ = gamma;
  p.c_ = c;
  return p;  // phi(x)/phi(2x) = 2^(gamma x) is unbounded: no doubling constant
}

DecayProfile DecayProfile::numeric(std::function<double(double)> phi,
                                   std::function<double(double)> tail,
                                   std::optional<double> kappa, double x0) {
  DecayProfile p;
  p.form_ = Form::numeric;
  p.phi_fn_ = std::move(phi);
  p.tail_fn_ = std::move(tail);
  p.kappa_ = kappa;
  p.x0_ = x0;
  return p;
}

double DecayProfile::phi(double x) const {
  switch (form_) {
    case Form::polynomial:
      return c_ * std::pow(x, -gamma_);
    case Form::exponential:
      return c_ * std::exp2(-gamma_ * x);
    case Form::numeric:
      return phi_fn_(x);
  }
  throw std::logic_error("decay profile: bad form");
}

double DecayProfile::tail(double y) const {
  if (std::isinf(y)) return 0.0;
  switch (form_) {
    case Form::polynomial:
      if (y <= 0.0) return std::numeric_limits<double>::infinity();
      return c_ * std::pow(y, 1.0 - gamma_) / (gamma_ - 1.0);
    case Form::exponential:
      return c_ * std::exp2(-gamma_ * y) / (gamma_ * std::numbers::ln2_v<double>);
    case Form::numeric:
      return tail_fn_(y);
  }
  throw std::logic_error("decay profile: bad form");
}

namespace {

double grow_bracket_and_bisect(const std::function<double(double)>& f, double target) {
  // f strictly decreasing toward 0.
  double lo = 1e-9, hi = 1.0;
  while (f(lo) < target) {
    lo /= 2.0;
    if (lo < 1e-300) return 0.0;
  }
  while (f(hi) >= target) {
    hi *= 2.0;
    if (hi > 1e300) throw std::runtime_error("decay profile: inverse out of range");
  }
  return bisect_monotone(f, target, lo, hi, /*decreasing=*/true);
}

}  // namespace

double DecayProfile::phi_inv(double y) const {
  if (!(y > 0)) throw std::invalid_argument("decay profile: inverse needs a positive value");
  switch (form_) {
    case Form::polynomial:
      return std::pow(y / c_, -1.0 / gamma_);
    case Form::exponential:
      return -std::log2(y / c_) / gamma_;
    case Form::numeric:
      return grow_bracket_and_bisect(phi_fn_, y);
  }
  throw std::logic_error("decay profile: bad form");
}

double DecayProfile::tail_inv(double z) const {
  if (!(z > 0)) throw std::invalid_argument("decay profile: inverse needs a positive value");
  switch (form_) {
    case Form::polynomial:
      return std::pow(z * (gamma_ - 1.0) / c_, -1.0 / (gamma_ - 1.0));
    case Form::exponential:
      return -std::log2(z * gamma_ * std::numbers::ln2_v<double> / c_) / gamma_;
    case Form::numeric:
      return grow_bracket_and_bisect(tail_fn_, z);
  }
  throw std::logic_error("decay profile: bad form");
}

bool DecayProfile::has_doubling() const {
  if (form_ == Form::polynomial) return true;
  if (form_ == Form::exponential) return false;
  return kappa_.has_value();
}

double dbar(const DecayProfile& profile, double y1, double y2) {
  if (!(y1 >= 0) || !(y1 <= y2)) throw std::invalid_argument("dbar: need 0 <= y1 <= y2");
  if (y1 == y2) return 0.0;
  return profile.tail(y1) - profile.tail(y2);
}

LevelWeights level_weights(const Tree& tree, const WeightSystem& ws) {
  LevelWeights lw;
  lw.q = ws.q;
  lw.alpha.assign(static_cast<std::size_t>(tree.max_depth()) + 1, -1.0);
  lw.sigma.assign(lw.alpha.size(), -1.0);
  for (std::size_t i = 0; i < tree.node_count(); ++i) {
    auto t = static_cast<NodeId>(i);
    auto n = static_cast<std::size_t>(tree.depth(t));
    double a = ws.alpha_at(t), s = ws.sigma_at(t);
    if (lw.alpha[n] < 0) {
      lw.alpha[n] = a;
      lw.sigma[n] = s;
    } else if (!nearly_equal(lw.alpha[n], a) || !nearly_equal(lw.sigma[n], s)) {
      throw std::domain_error("level_weights: weights differ within depth " + std::to_string(n));
    }
  }
  return lw;
}

double radial_dist(const LevelWeights& lw, int n1, int n2) {
  if (n1 > n2) throw std::invalid_argument("radial_dist: need n1 <= n2");
  if (static_cast<std::size_t>(n2) >= lw.alpha.size())
    throw std::invalid_argument("radial_dist: level beyond table");
  double acc = 0.0, best = 0.0;
  for (int v = n1 + 1; v <= n2; ++v) {
    acc += std::pow(lw.alpha[static_cast<std::size_t>(v)], lw.q);
    best = std::max(best, std::pow(acc, 1.0 / lw.q) * lw.sigma[static_cast<std::size_t>(v)]);
  }
  return best;
}

}  // namespace treesum
