#include "treesum/nets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

namespace treesum {

long long LevelNet::count() const { return static_cast<long long>(levels().size()); }

std::vector<long long> LevelNet::levels() const {
  std::set<long long> all(m_levels.begin(), m_levels.end());
  all.insert(u.begin(), u.end());
  return {all.begin(), all.end()};
}

LevelNet level_net(const DecayProfile& profile, double eps) {
  if (!(eps > 0)) throw std::invalid_argument("level_net: eps must be positive");
  LevelNet net;
  net.epsilon = eps;
  double cut = profile.phi(1.0) >= eps ? profile.phi_inv(eps) : 0.0;
  for (long long n = 1; static_cast<double>(n) <= cut * (1.0 + kRelTol); ++n)
    net.m_levels.push_back(n);

  double budget = profile.tail(profile.phi_inv(eps)) / eps;
  long long N = static_cast<long long>(std::floor(budget * (1.0 + kRelTol)));
  if (N < 1) return net;  // no thinned points needed

  net.u_tilde.resize(static_cast<std::size_t>(N));
  net.u.resize(static_cast<std::size_t>(N));
  for (long long k = 1; k <= N; ++k)
    net.u_tilde[static_cast<std::size_t>(k - 1)] = profile.tail_inv(static_cast<double>(k) * eps);
  for (long long k = 1; k < N; ++k)
    net.u[static_cast<std::size_t>(k - 1)] =
        static_cast<long long>(std::floor(net.u_tilde[static_cast<std::size_t>(k - 1)]));
  // Last point: keep floor(u~_N) unless it fell below phi^-1(eps), in which
  // case move to the first integer past the cut.
  double last = net.u_tilde[static_cast<std::size_t>(N - 1)];
  double cut_exact = profile.phi_inv(eps);
  if (std::floor(last) >= cut_exact)
    net.u[static_cast<std::size_t>(N - 1)] = static_cast<long long>(std::floor(last));
  else
    net.u[static_cast<std::size_t>(N - 1)] = static_cast<long long>(std::floor(cut_exact)) + 1;

  // In the thinned region consecutive u~ gaps exceed one.
  for (long long k = 1; k < N; ++k) {
    double gap = net.u_tilde[static_cast<std::size_t>(k - 1)] - net.u_tilde[static_cast<std::size_t>(k)];
    if (!(gap > 1.0 - 1e-9))
      throw std::logic_error("level_net: thinned levels closer than one step");
  }
  return net;
}

LevelNetCheck check_level_net(const DecayProfile& profile, const LevelNet& net,
                              long long horizon) {
  LevelNetCheck res;
  auto pts = net.levels();
  if (pts.empty()) {
    res.ok = false;
    res.tail_ok = false;
    return res;
  }
  long long top = pts.back();
  if (horizon <= 0) horizon = top;
  horizon = std::min(horizon, top);  // beyond the top level the tail test rules
  double two_eps = 2.0 * net.epsilon;
  for (long long n = 1; n <= horizon; ++n) {
    auto it = std::upper_bound(pts.begin(), pts.end(), n);
    if (it == pts.begin()) {
      res.ok = false;
      res.first_violation = n;
      break;
    }
    long long w = *std::prev(it);
    if (!covers(dbar(profile, static_cast<double>(w), static_cast<double>(n)), two_eps)) {
      res.ok = false;
      res.first_violation = n;
      break;
    }
  }
  res.tail_ok = covers(profile.tail(static_cast<double>(top)), two_eps);
  res.ok = res.ok && res.tail_ok;
  return res;
}

CoverCertificate tree_net_from_levels(const MetricEvaluator& me, const DecayProfile& profile,
                                      double eps) {
  const Tree& tree = me.tree();
  const WeightSystem& ws = me.weights();
  const double q = ws.q;
  for (std::size_t i = 0; i < tree.node_count(); ++i) {
    auto t = static_cast<NodeId>(i);
    double prod = std::pow(ws.alpha_at(t) * ws.sigma_at(t), q);
    double bound = profile.phi(std::max(1.0, static_cast<double>(tree.depth(t))));
    if (tree.depth(t) >= 1 && prod > bound * (1.0 + kRelTol))
      throw std::domain_error("tree_net_from_levels: (alpha sigma)^q exceeds phi at node " +
                              std::to_string(i));
  }
  LevelNet base = level_net(profile, std::pow(eps, q));
  CoverCertificate cert;
  cert.kind = CoverKind::order;
  cert.epsilon = std::exp2(1.0 / q) * eps;
  cert.construction = "level_net";
  cert.centers.push_back(0);  // only the root covers the root
  for (long long lvl : base.levels()) {
    if (lvl > tree.max_depth()) break;
    const auto& nodes = tree.level(static_cast<int>(lvl));
    cert.centers.insert(cert.centers.end(), nodes.begin(), nodes.end());
  }
  std::sort(cert.centers.begin(), cert.centers.end());
  cert.centers.erase(std::unique(cert.centers.begin(), cert.centers.end()), cert.centers.end());
  cert.verified = verify_certificate(me, cert).ok;
  return cert;
}

GrowthLaw GrowthLaw::constant(double c) {
  GrowthLaw g;
  g.kind = Kind::constant;
  g.c = c;
  return g;
}

GrowthLaw GrowthLaw::polynomial(double order, double c) {
  GrowthLaw g;
  g.kind = Kind::polynomial;
  g.order = order;
  g.c = c;
  return g;
}

GrowthLaw GrowthLaw::binary() {
  GrowthLaw g;
  g.kind = Kind::binary;
  return g;
}

double GrowthLaw::value(double x) const {
  switch (kind) {
    case Kind::constant:
      return c;
    case Kind::polynomial:
      return c * std::pow(std::max(1.0, x), order);
    case Kind::binary:
      return std::exp2(x);
  }
  throw std::logic_error("growth law: bad kind");
}

double GrowthLaw::integral(double a, double b) const {
  if (!(a <= b)) throw std::invalid_argument("growth law: reversed integral limits");
  switch (kind) {
    case Kind::constant:
      return c * (b - a);
    case Kind::polynomial: {
      // piecewise: constant c on [0,1], c x^order beyond
      auto piece = [&](double x) {  // antiderivative valid for x >= 1
        return c * std::pow(x, order + 1.0) / (order + 1.0);
      };
      double lo = std::max(a, 1.0), hi = std::max(b, 1.0);
      double flat = c * (std::min(b, 1.0) - std::min(a, 1.0));
      return flat + (hi > lo ? piece(hi) - piece(lo) : 0.0);
    }
    case Kind::binary: {
      constexpr double ln2 = 0.6931471805599453;
      return (std::exp2(b) - std::exp2(a)) / ln2;
    }
  }
  throw std::logic_error("growth law: bad kind");
}

namespace {

// int_a^b rho(y) phi(y) dy, closed form where cheap, quadrature otherwise.
double rho_phi_integral(const GrowthLaw& rho, const DecayProfile& profile, double a, double b) {
  if (a >= b) return 0.0;
  if (std::isinf(b)) {
    if (profile.form() == DecayProfile::Form::polynomial &&
        (rho.kind == GrowthLaw::Kind::constant || rho.kind == GrowthLaw::Kind::polynomial)) {
      double ord = rho.kind == GrowthLaw::Kind::constant ? 0.0 : rho.order;
      double cr = rho.kind == GrowthLaw::Kind::constant ? rho.c : rho.c;
      double expo = profile.gamma() - ord - 1.0;  // integrand ~ x^{-(expo+1)}
      if (!(expo > 0)) throw std::domain_error("net size bound: rho*phi tail diverges");
      double lo = std::max(a, 1.0);
      return cr * profile.scale() * std::pow(lo, -expo) / expo;
    }
    if (profile.form() == DecayProfile::Form::exponential) {
      // finite for any polynomial rho; integrate numerically to a far cutoff
      double cut = a;
      while (profile.phi(cut) * rho.value(cut) > 1e-16 && cut < a + 1e6) cut *= 2.0;
      return integrate([&](double x) { return rho.value(x) * profile.phi(x); }, a, cut);
    }
    throw std::domain_error("net size bound: cannot integrate this rho*phi to infinity");
  }
  return integrate([&](double x) { return rho.value(x) * profile.phi(x); }, a, b);
}

}  // namespace

double radial_net_size_bound(const GrowthLaw& rho, const DecayProfile& profile, double q,
                             double eps, NetBoundVariant variant) {
  if (!(eps > 0) || !(q >= 1)) throw std::invalid_argument("net size bound: bad parameters");
  double e = std::pow(eps, q) / 2.0;
  double cut = profile.phi_inv(e);
  double deep = profile.tail_inv(e);
  double term1 = rho.integral(0.0, cut + 1.0);
  double term2 = rho.value(deep);
  double term3;
  switch (variant) {
    case NetBoundVariant::base:
      term3 = rho_phi_integral(rho, profile, cut, deep);
      break;
    case NetBoundVariant::convergent:
      term3 = rho_phi_integral(rho, profile, cut, std::numeric_limits<double>::infinity());
      break;
    case NetBoundVariant::divergent:
      term3 = rho_phi_integral(rho, profile, 1.0, deep);
      break;
    default:
      throw std::logic_error("net size bound: bad variant");
  }
  return term1 + term2 + 2.0 * std::pow(eps, -q) * term3;
}

namespace {

void require_radial_polynomial_weights(const MetricEvaluator& me, double gamma) {
  const Tree& tree = me.tree();
  const WeightSystem& ws = me.weights();
  for (std::size_t i = 0; i < tree.node_count(); ++i) {
    auto t = static_cast<NodeId>(i);
    double expected = std::pow(std::max(1.0, static_cast<double>(tree.depth(t))), -gamma / ws.q);
    if (!nearly_equal(ws.alpha_at(t), expected, 1e-9))
      throw std::domain_error("biased_tree_net: alpha must follow max(1,depth)^(-gamma/q)");
    if (!nearly_equal(ws.sigma[i], 1.0, 1e-12))
      throw std::domain_error("biased_tree_net: sigma must be constant");
  }
}

}  // namespace

BiasedNetResult biased_tree_net(const MetricEvaluator& me, double gamma, double eps,
                                double c_star) {
  const Tree& tree = me.tree();
  if (tree.kind() != Tree::Kind::biased)
    throw std::domain_error("biased_tree_net: requires a biased tree");
  if (!(gamma > 1.0)) throw std::invalid_argument("biased_tree_net: gamma must exceed 1");
  if (!(eps > 0)) throw std::invalid_argument("biased_tree_net: eps must be positive");
  require_radial_polynomial_weights(me, gamma);

  const double q = me.q();
  const int order = tree.biased_order();
  DecayProfile profile = DecayProfile::polynomial(gamma);
  const double eq = std::pow(eps, q);

  BiasedNetSpec spec;
  spec.order = order;
  spec.gamma = gamma;
  spec.q = q;
  spec.epsilon = eps;
  spec.c_star = c_star;
  spec.j_count = std::max<long long>(1, static_cast<long long>(std::floor(std::pow(eps, -q / gamma))));

  auto level_threshold = [&](long long j) {
    // smallest n in N with Phi(n) <= j eps^q
    double y = profile.tail_inv(static_cast<double>(j) * eq);
    auto n = static_cast<long long>(std::ceil(y - 1e-12));
    return std::max<long long>(n, 1);
  };
  double nu_cap = c_star * std::pow(eps, -q * static_cast<double>(order) / gamma);
  for (long long j = 1; j <= spec.j_count + 1; ++j) {
    long long nj = level_threshold(j);
    spec.n_levels.push_back(nj);
    long long rn = nj <= tree.max_depth() ? static_cast<long long>(tree.level(static_cast<int>(nj)).size())
                                          : biased_generation(order, static_cast<int>(nj));
    spec.nu.push_back(std::max<long long>(1, std::min<long long>(
                                                 static_cast<long long>(std::floor(nu_cap)), rn)));
  }
  for (std::size_t j = 1; j < spec.n_levels.size(); ++j)
    if (spec.n_levels[j] > spec.n_levels[j - 1])
      throw std::logic_error("biased_tree_net: thresholds must not increase");

  long long n_last = spec.n_levels[static_cast<std::size_t>(spec.j_count - 1)];
  if (n_last > tree.max_depth())
    throw std::domain_error("biased_tree_net: construction needs depth " + std::to_string(n_last) +
                            " but the tree stops at " + std::to_string(tree.max_depth()));

  CoverCertificate cert;
  cert.kind = CoverKind::order;
  cert.epsilon = std::exp2(1.0 / q) * eps;
  cert.construction = "biased";
  spec.s1_size = 0;
  for (long long n = 0; n < n_last; ++n) {
    if (n > tree.max_depth()) break;
    const auto& lvl = tree.level(static_cast<int>(n));
    cert.centers.insert(cert.centers.end(), lvl.begin(), lvl.end());
    spec.s1_size += static_cast<long long>(lvl.size());
  }
  for (long long j = 1; j <= spec.j_count; ++j) {
    long long nj = spec.n_levels[static_cast<std::size_t>(j - 1)];
    if (nj > tree.max_depth()) continue;
    const auto& lvl = tree.level(static_cast<int>(nj));
    long long take = std::min<long long>(spec.nu[static_cast<std::size_t>(j - 1)],
                                         static_cast<long long>(lvl.size()));
    // level lists are ordered right to left, so the first `take` entries are
    // the rightmost nodes
    cert.centers.insert(cert.centers.end(), lvl.begin(), lvl.begin() + take);
  }
  std::sort(cert.centers.begin(), cert.centers.end());
  cert.centers.erase(std::unique(cert.centers.begin(), cert.centers.end()), cert.centers.end());
  spec.net_size = static_cast<long long>(cert.centers.size());
  spec.size_ratio =
      static_cast<double>(spec.net_size) /
      std::pow(eps, -q * (static_cast<double>(order) + 1.0) / gamma);

  // Structural check: every node of depth >= n_j has an ancestor among the
  // nu_{j+1} rightmost nodes of level n_{j+1}. One flag sweep per j.
  spec.structure_ok = true;
  const std::size_t node_count = tree.node_count();
  std::vector<char> flag(node_count, 0);
  for (long long j = 1; j <= spec.j_count && spec.structure_ok; ++j) {
    long long nj = spec.n_levels[static_cast<std::size_t>(j - 1)];
    long long next_level = spec.n_levels[static_cast<std::size_t>(j)];
    long long next_nu = spec.nu[static_cast<std::size_t>(j)];
    if (nj > tree.max_depth()) continue;
    std::fill(flag.begin(), flag.end(), 0);
    for (std::size_t i = 0; i < node_count; ++i) {
      auto t = static_cast<NodeId>(i);
      int d = tree.depth(t);
      if (d < next_level) continue;
      if (d == next_level)
        flag[i] = tree.level_rank(t) < next_nu ? 1 : 0;
      else
        flag[i] = flag[static_cast<std::size_t>(tree.parent(t))];
      if (d == nj && d > next_level && !flag[i]) {
        spec.structure_ok = false;
        break;
      }
      if (d >= nj && !flag[i] && d > next_level) {
        // deeper nodes inherit their level-n_j ancestor's flag, so the check
        // at depth n_j is the binding one; nothing further to do here
      }
    }
  }

  cert.verified = verify_certificate(me, cert).ok && spec.structure_ok;
  return {spec, cert};
}

BiasedNetResult biased_tree_net_auto(const MetricEvaluator& me, double gamma, double eps,
                                     double c_star_start, int max_doublings) {
  double c_star = c_star_start;
  BiasedNetResult result = biased_tree_net(me, gamma, eps, c_star);
  for (int k = 0; k < max_doublings && !result.certificate.verified; ++k) {
    c_star *= 2.0;
    result = biased_tree_net(me, gamma, eps, c_star);
  }
  return result;
}

TruncationPacking truncation_packing(const MetricEvaluator& me, const DecayProfile& profile,
                                     double eps, const GrowthLaw& rho) {
  const Tree& tree = me.tree();
  const WeightSystem& ws = me.weights();
  const double q = ws.q;
  const double eq = std::pow(eps, q);
  double cut = profile.phi_inv(eq);
  auto cutoff = static_cast<long long>(std::floor(cut * (1.0 + kRelTol)));
  cutoff = std::min<long long>(cutoff, tree.max_depth());

  TruncationPacking out;
  out.cutoff_level = cutoff;
  out.certificate.epsilon = eps;
  out.certificate.construction = "truncation";
  for (long long n = 0; n <= cutoff; ++n)
    for (NodeId t : tree.level(static_cast<int>(n))) {
      if (n >= 1) {
        double prod = std::pow(ws.alpha_at(t) * ws.sigma_at(t), q);
        double need = profile.phi(static_cast<double>(n));
        if (prod < need * (1.0 - kRelTol))
          throw std::domain_error("truncation_packing: (alpha sigma)^q below phi at node " +
                                  std::to_string(t));
      }
      out.certificate.points.push_back(t);
    }
  out.certificate.pairwise_min = min_pairwise_distance(me, out.certificate.points);
  out.rho_integral = cut - 1.0 > 1.0 ? rho.integral(1.0, cut - 1.0) : 0.0;
  return out;
}

SpacedLevelPacking spaced_level_packing(const MetricEvaluator& me, const DecayProfile& profile,
                                        double eps, const GrowthLaw& rho) {
  const Tree& tree = me.tree();
  const WeightSystem& ws = me.weights();
  const double q = ws.q;
  for (double s : ws.sigma)
    if (!nearly_equal(s, 1.0, 1e-12))
      throw std::domain_error("spaced_level_packing: requires constant sigma");
  if (!profile.has_doubling())
    throw std::domain_error("spaced_level_packing: profile lacks the doubling property");
  for (std::size_t i = 0; i < tree.node_count(); ++i) {
    auto t = static_cast<NodeId>(i);
    int d = tree.depth(t);
    if (d >= 1) {
      double lhs = std::pow(ws.alpha_at(t), q);
      if (lhs < profile.phi(static_cast<double>(d)) * (1.0 - kRelTol))
        throw std::domain_error("spaced_level_packing: alpha^q below phi at node " +
                                std::to_string(t));
    }
  }

  const double eq = std::pow(eps, q);
  double budget = profile.tail(profile.phi_inv(eq)) / eq;
  auto N = static_cast<long long>(std::floor(budget));
  SpacedLevelPacking out;
  out.certificate.epsilon = eps;
  out.certificate.construction = "spaced_levels";
  out.m = N / 3;
  out.count_bound_held = static_cast<double>(out.m) >= budget / 4.0;
  if (out.m < 2) return out;  // nothing to pick

  out.v_levels.resize(static_cast<std::size_t>(out.m));
  for (long long k = 1; k <= out.m; ++k) {
    double ut = profile.tail_inv(static_cast<double>(3 * k) * eq);
    out.v_levels[static_cast<std::size_t>(k - 1)] = static_cast<long long>(std::floor(ut)) + 1;
  }
  if (out.v_levels.front() > tree.max_depth())
    throw std::domain_error("spaced_level_packing: needs depth " +
                            std::to_string(out.v_levels.front()) + " but the tree stops at " +
                            std::to_string(tree.max_depth()));
  // Fertility up to the working depth.
  for (std::size_t i = 0; i < tree.node_count(); ++i) {
    auto t = static_cast<NodeId>(i);
    if (tree.depth(t) < out.v_levels.front() && tree.child_count(t) == 0)
      throw std::domain_error("spaced_level_packing: node " + std::to_string(t) +
                              " has no child below the working depth");
  }

  // For each node of level v_k pick its leftmost descendant at level v_{k-1}
  // (deterministic: repeatedly take the first child).
  for (long long k = 2; k <= out.m; ++k) {
    long long from = out.v_levels[static_cast<std::size_t>(k - 1)];
    long long to = out.v_levels[static_cast<std::size_t>(k - 2)];
    for (NodeId t : tree.level(static_cast<int>(from))) {
      NodeId s = t;
      for (long long d = from; d < to; ++d) s = tree.children(s)[0];
      out.certificate.points.push_back(s);
    }
  }
  out.certificate.pairwise_min = min_pairwise_distance(me, out.certificate.points);

  double lo = profile.phi_inv(eq), hi = profile.tail_inv(8.0 * eq);
  out.integral_lower =
      hi > lo ? 0.25 * std::pow(eps, -q) *
                    integrate([&](double y) { return rho.value(y) * profile.phi(y); }, lo, hi)
              : 0.0;
  return out;
}

BinaryLogCounts binary_log_counts(double gamma, double q, const std::vector<double>& eps_grid) {
  if (!(gamma > 1.0)) throw std::invalid_argument("binary_log_counts: gamma must exceed 1");
  DecayProfile profile = DecayProfile::polynomial(gamma);
  BinaryLogCounts out;
  out.eps = eps_grid;
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  auto log2_sum_pow2 = [](const std::vector<long long>& lvls) {
    if (lvls.empty()) return nan;
    long long top = *std::max_element(lvls.begin(), lvls.end());
    double s = 0.0;
    for (long long l : lvls) s += std::exp2(static_cast<double>(l - top));
    return static_cast<double>(top) + std::log2(s);
  };
  for (double eps : eps_grid) {
    const double eq = std::pow(eps, q);
    LevelNet net = level_net(profile, eq);
    auto lvls = net.levels();
    lvls.push_back(0);  // the root joins every tree net
    out.log2_upper.push_back(log2_sum_pow2(lvls));
    out.top_net_level.push_back(*std::max_element(lvls.begin(), lvls.end()));

    double budget = profile.tail(profile.phi_inv(eq)) / eq;
    auto N = static_cast<long long>(std::floor(budget));
    long long m = N / 3;
    if (m < 2) {
      out.log2_lower.push_back(nan);
    } else {
      std::vector<long long> vks;
      for (long long k = 2; k <= m; ++k)
        vks.push_back(static_cast<long long>(
                          std::floor(profile.tail_inv(static_cast<double>(3 * k) * eq))) +
                      1);
      out.log2_lower.push_back(log2_sum_pow2(vks));
    }
  }
  for (std::size_t i = 0; i < out.eps.size(); ++i)
    if (!std::isnan(out.log2_lower[i]) && out.log2_lower[i] > out.log2_upper[i])
      throw std::logic_error("binary_log_counts: lower bound exceeded upper bound");
  return out;
}

}  // namespace treesum
