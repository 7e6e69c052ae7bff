#include "treesum/summation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace treesum {

double norm_q(const SparseVec& v, double q) {
  double s = 0.0;
  for (auto [n, x] : v) s += std::pow(std::abs(x), q);
  return std::pow(s, 1.0 / q);
}

double norm_1(const SparseVec& v) {
  double s = 0.0;
  for (auto [n, x] : v) s += std::abs(x);
  return s;
}

double dist_q(const SparseVec& a, const SparseVec& b, double q) {
  double s = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j >= b.size() || (i < a.size() && a[i].first < b[j].first)) {
      s += std::pow(std::abs(a[i].second), q);
      ++i;
    } else if (i >= a.size() || b[j].first < a[i].first) {
      s += std::pow(std::abs(b[j].second), q);
      ++j;
    } else {
      s += std::pow(std::abs(a[i].second - b[j].second), q);
      ++i;
      ++j;
    }
  }
  return std::pow(s, 1.0 / q);
}

double dot(const SparseVec& a, const SparseVec& b) {
  double s = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].first < b[j].first)
      ++i;
    else if (b[j].first < a[i].first)
      ++j;
    else
      s += a[i++].second * b[j++].second;
  }
  return s;
}

OperatorBundle::OperatorBundle(const Tree& tree, const WeightSystem& ws)
    : tree_(&tree), ws_(&ws) {
  if (ws.tree != &tree) throw std::invalid_argument("operator: weights built for another tree");
  prefix_ = ws.alpha_pow_prefix();
}

SparseVec OperatorBundle::column(NodeId t) const {
  tree_->check_node(t);
  double s = ws_->sigma_at(t);
  auto path = tree_->ancestors(t);
  SparseVec col;
  col.reserve(path.size());
  for (NodeId r : path) col.emplace_back(r, s * ws_->alpha_at(r));
  return col;
}

double OperatorBundle::column_norm(NodeId t) const {
  return ws_->sigma_at(t) * std::pow(prefix_[static_cast<std::size_t>(t)], 1.0 / ws_->q);
}

SparseVec OperatorBundle::apply(const SparseVec& x) const {
  // (Vx)(t) = alpha(t) * sum over s >= t of sigma(s) x(s): push each x(s)
  // up the root path of s.
  std::vector<double> acc(tree_->node_count(), 0.0);
  std::vector<bool> touched(tree_->node_count(), false);
  for (auto [s, xs] : x) {
    tree_->check_node(s);
    double w = ws_->sigma_at(s) * xs;
    for (NodeId r = s;; r = tree_->parent(r)) {
      acc[static_cast<std::size_t>(r)] += w;
      touched[static_cast<std::size_t>(r)] = true;
      if (r == 0) break;
    }
  }
  SparseVec out;
  for (std::size_t t = 0; t < acc.size(); ++t)
    if (touched[t]) out.emplace_back(static_cast<NodeId>(t), ws_->alpha_at(static_cast<NodeId>(t)) * acc[t]);
  return out;
}

double OperatorBundle::operator_norm() const {
  double best = 0.0;
  for (std::size_t t = 0; t < tree_->node_count(); ++t)
    best = std::max(best, column_norm(static_cast<NodeId>(t)));
  return best;
}

DyadicFactorization::DyadicFactorization(const OperatorBundle& op) : op_(&op) {
  auto rounding = dyadic_round(op.weights());
  band_ = std::move(rounding.level_of);
  sigma_hat_.resize(rounding.sigma_hat.size());
  for (std::size_t i = 0; i < sigma_hat_.size(); ++i)
    sigma_hat_[i] = op.weights().sigma_scale * rounding.sigma_hat[i];
}

double DyadicFactorization::delta(NodeId t) const {
  auto i = static_cast<std::size_t>(t);
  return op_->weights().sigma_scale * op_->weights().sigma[i] / sigma_hat_[i];
}

std::vector<DyadicFactorization::BandInterval> DyadicFactorization::path_bands(NodeId t) const {
  auto path = op_->tree().ancestors(t);
  std::vector<BandInterval> bands;
  for (NodeId r : path) {
    int m = band_[static_cast<std::size_t>(r)];
    if (bands.empty() || bands.back().band != m)
      bands.push_back({m, r, r});
    else
      bands.back().theta = r;
  }
  return bands;
}

SparseVec DyadicFactorization::w_column(NodeId t) const {
  // Partial summation within the band of t: support [lambda_m(t), t].
  const Tree& tree = op_->tree();
  int m = band_[static_cast<std::size_t>(t)];
  double s = sigma_hat_[static_cast<std::size_t>(t)];
  SparseVec col;
  NodeId r = t;
  while (true) {
    if (band_[static_cast<std::size_t>(r)] != m) break;
    col.emplace_back(r, s * op_->weights().alpha_at(r));
    if (r == 0) break;
    r = tree.parent(r);
  }
  std::reverse(col.begin(), col.end());
  return col;
}

SparseVec DyadicFactorization::z_column(NodeId t) const {
  int m = band_[static_cast<std::size_t>(t)];
  SparseVec col;
  for (const auto& bi : path_bands(t))
    col.emplace_back(bi.theta, std::exp2(static_cast<double>(bi.band - m)));
  return col;
}

double DyadicFactorization::z_column_norm1(NodeId t) const { return norm_1(z_column(t)); }

SparseVec DyadicFactorization::composed_column(NodeId t) const {
  // W(Z(Delta delta_t)) with the structural interval supports.
  double dt = delta(t);
  SparseVec out;
  for (const auto& [theta, weight] : z_column(t)) {
    SparseVec wcol = w_column(theta);
    for (auto [r, v] : wcol) out.emplace_back(r, dt * weight * v);
  }
  std::sort(out.begin(), out.end());
  return out;
}

double DyadicFactorization::factorization_residual() const {
  double worst = 0.0;
  for (std::size_t t = 0; t < op_->tree().node_count(); ++t) {
    auto node = static_cast<NodeId>(t);
    SparseVec expect = op_->column(node);
    SparseVec got = composed_column(node);
    double d = dist_q(expect, got, op_->q());
    double scale = std::max(norm_q(expect, op_->q()), 1e-300);
    worst = std::max(worst, d / scale);
  }
  return worst;
}

WeightSystem DyadicFactorization::rounded_weights() const {
  return assign_values(op_->tree(), op_->weights().alpha, sigma_hat_, op_->q());
}

WPointCover cover_w_points(const DyadicFactorization& fact, double eps, std::size_t exact_limit) {
  const Tree& tree = fact.op().tree();
  const double q = fact.op().q();
  std::vector<SparseVec> points;
  points.reserve(tree.node_count());
  for (std::size_t t = 0; t < tree.node_count(); ++t)
    points.push_back(fact.w_column(static_cast<NodeId>(t)));
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());

  const std::size_t n = points.size();
  const std::size_t cands = n + 1;  // the points plus the origin
  if (cands > exact_limit)
    throw std::invalid_argument("cover_w_points: too many candidates for exact covering");
  std::vector<Bitset> sets(cands, Bitset(n));
  for (std::size_t c = 0; c < n; ++c)
    for (std::size_t p = 0; p < n; ++p)
      if (covers(dist_q(points[c], points[p], q), eps)) sets[c].set(p);
  for (std::size_t p = 0; p < n; ++p)
    if (covers(norm_q(points[p], q), eps)) sets[n].set(p);

  WPointCover out;
  out.point_count = n;
  out.cover_count = static_cast<long long>(solve_min_cover(sets, CoverMode::exact, exact_limit).size());
  return out;
}

Inscription inscribe_identity(const OperatorBundle& op, const IntervalFamily& family,
                              const Verification& family_check) {
  if (!family_check.ok)
    throw std::invalid_argument("inscribe_identity: interval family failed verification");
  const Tree& tree = op.tree();
  const WeightSystem& ws = op.weights();
  const double q = ws.q;
  const double qp_exp = 1.0 - 1.0 / q;  // 1/q' as an exponent on sums of alpha^q

  Inscription ins;
  ins.intervals = family.intervals;
  ins.epsilon = family.epsilon;
  ins.q = q;
  MetricEvaluator me(tree, ws);
  for (auto [t, s] : family.intervals) {
    // Distance-attaining node v in (t, s].
    NodeId vbest = s;
    double best = -1.0;
    for (NodeId v = s; v != t; v = tree.parent(v)) {
      double val = std::pow(me.prefix(v) - me.prefix(t), 1.0 / q) * ws.sigma_at(v);
      if (val > best) {
        best = val;
        vbest = v;
      }
    }
    ins.maximizers.push_back(vbest);

    SparseVec y{{t, -ws.sigma_at(vbest) / ws.sigma_at(t)}, {vbest, 1.0}};
    std::sort(y.begin(), y.end());
    ins.y.push_back(std::move(y));

    double asum = me.prefix(vbest) - me.prefix(t);
    double beta = std::pow(asum, qp_exp);
    SparseVec z, b;
    for (NodeId r = vbest; r != t; r = tree.parent(r)) {
      z.emplace_back(r, ws.sigma_at(vbest) * ws.alpha_at(r));
      b.emplace_back(r, std::pow(ws.alpha_at(r), q - 1.0) / beta);
    }
    std::sort(z.begin(), z.end());
    std::sort(b.begin(), b.end());
    ins.z.push_back(std::move(z));
    ins.b.push_back(std::move(b));
    ins.diagonal.push_back(best);
  }
  return ins;
}

Inscription inscribe_identity(const OperatorBundle& op, const IntervalFamily& family) {
  MetricEvaluator me(op.tree(), op.weights());
  return inscribe_identity(op, family, verify_family(me, family));
}

std::vector<double> Inscription::project(const SparseVec& zv) const {
  std::vector<double> out(size());
  for (std::size_t i = 0; i < size(); ++i) out[i] = dot(zv, b[i]);
  return out;
}

double Inscription::project_norm(const SparseVec& zv) const {
  double s = 0.0;
  for (double v : project(zv)) s += std::pow(std::abs(v), q);
  return std::pow(s, 1.0 / q);
}

namespace {

// Dense image of a coefficient vector over the operator columns.
struct HullGeometry {
  std::vector<std::vector<double>> cols;  // dense columns
  double q;
  std::size_t dim;

  std::vector<double> combine(const std::vector<double>& coeff) const {
    std::vector<double> v(dim, 0.0);
    for (std::size_t i = 0; i < cols.size(); ++i) {
      if (coeff[i] == 0.0) continue;
      for (std::size_t d = 0; d < dim; ++d) v[d] += coeff[i] * cols[i][d];
    }
    return v;
  }
  double dist(const std::vector<double>& a, const std::vector<double>& b) const {
    double s = 0.0;
    for (std::size_t d = 0; d < dim; ++d) s += std::pow(std::abs(a[d] - b[d]), q);
    return std::pow(s, 1.0 / q);
  }
  double norm(const std::vector<double>& a) const {
    double s = 0.0;
    for (double x : a) s += std::pow(std::abs(x), q);
    return std::pow(s, 1.0 / q);
  }
};

// Enumerates integer vectors m with sum |m_i| <= steps, visiting the image of
// each grid point m / steps of the coefficient l1 ball.
void for_each_grid_point(const HullGeometry& geo, int steps,
                         const std::function<void(const std::vector<double>&)>& visit) {
  const std::size_t k = geo.cols.size();
  std::vector<double> coeff(k, 0.0);
  std::function<void(std::size_t, int)> rec = [&](std::size_t i, int left) {
    if (i == k) {
      visit(geo.combine(coeff));
      return;
    }
    for (int m = -left; m <= left; ++m) {
      coeff[i] = static_cast<double>(m) / steps;
      rec(i + 1, left - std::abs(m));
    }
    coeff[i] = 0.0;
  };
  rec(0, steps);
}

double packing_lower_bound(const HullGeometry& geo, const std::vector<std::vector<double>>& pool,
                           std::size_t need) {
  // Any (need) points pairwise > 2r apart force e_n >= r for 2^(n-1) < need.
  const std::size_t n = pool.size();
  if (n < need) return 0.0;
  std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      dist[i][j] = dist[j][i] = geo.dist(pool[i], pool[j]);

  double best = 0.0;
  if (need <= 5 && n <= 40) {  // exhaustive subsets
    std::vector<std::size_t> idx(need);
    std::function<void(std::size_t, std::size_t, double)> rec = [&](std::size_t from,
                                                                    std::size_t depth,
                                                                    double cur_min) {
      if (cur_min <= 2.0 * best) return;
      if (depth == need) {
        best = std::max(best, cur_min / 2.0);
        return;
      }
      for (std::size_t c = from; c + (need - depth) <= n + 0; ++c) {
        double m = cur_min;
        for (std::size_t d = 0; d < depth; ++d) m = std::min(m, dist[idx[d]][c]);
        if (m <= 2.0 * best) continue;
        idx[depth] = c;
        rec(c + 1, depth + 1, m);
      }
    };
    rec(0, 0, std::numeric_limits<double>::infinity());
    return best;
  }
  // Greedy farthest-point packing; still a valid witness.
  std::vector<std::size_t> chosen{0};
  while (chosen.size() < need) {
    std::size_t far = chosen.front();
    double far_d = -1.0;
    for (std::size_t c = 0; c < n; ++c) {
      double m = std::numeric_limits<double>::infinity();
      for (std::size_t s : chosen) m = std::min(m, dist[s][c]);
      if (m > far_d) {
        far_d = m;
        far = c;
      }
    }
    chosen.push_back(far);
  }
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < chosen.size(); ++i)
    for (std::size_t j = i + 1; j < chosen.size(); ++j)
      m = std::min(m, dist[chosen[i]][chosen[j]]);
  return m / 2.0;
}

}  // namespace

EntropyBracket entropy_bracket(const OperatorBundle& op, int n, double grid_step) {
  const Tree& tree = op.tree();
  if (tree.node_count() > 12)
    throw std::invalid_argument("entropy_bracket: limited to trees of at most 12 nodes");
  if (n < 1 || n > 4) throw std::invalid_argument("entropy_bracket: n must lie in [1, 4]");

  EntropyBracket out;
  out.grid_step = grid_step;
  if (n == 1) {
    // One ball: the hull is symmetric, so the origin is an optimal center and
    // the radius is the largest column norm; a two-point packing matches it.
    double m = op.operator_norm();
    out.lower = out.upper = m;
    out.grid_error = 0.0;
    return out;
  }

  HullGeometry geo;
  geo.q = op.q();
  geo.dim = tree.node_count();
  for (std::size_t t = 0; t < tree.node_count(); ++t) {
    std::vector<double> dense(geo.dim, 0.0);
    for (auto [r, v] : op.column(static_cast<NodeId>(t))) dense[static_cast<std::size_t>(r)] = v;
    geo.cols.push_back(std::move(dense));
  }

  const auto balls = static_cast<std::size_t>(1) << (n - 1);

  // Upper bound: farthest-point centers over the grid image, plus the
  // rounding error of the grid (coefficients rounded toward zero).
  int steps = std::max(1, static_cast<int>(std::llround(1.0 / grid_step)));
  double col_norm_total = 0.0;
  for (const auto& c : geo.cols) col_norm_total += geo.norm(c);
  out.grid_error = col_norm_total / steps;

  std::vector<std::vector<double>> centers{std::vector<double>(geo.dim, 0.0)};
  double radius = 0.0;
  for (std::size_t pass = 0; pass < balls; ++pass) {
    std::vector<double> farthest;
    double far_d = -1.0;
    for_each_grid_point(geo, steps, [&](const std::vector<double>& pt) {
      double m = std::numeric_limits<double>::infinity();
      for (const auto& c : centers) m = std::min(m, geo.dist(pt, c));
      if (m > far_d) {
        far_d = m;
        farthest = pt;
      }
    });
    if (pass + 1 < balls)
      centers.push_back(farthest);
    else
      radius = far_d;
  }
  out.upper = radius + out.grid_error;

  // Lower bound: packings of hull points; the columns and their negatives
  // are hull points, as are halves of inscribed identity images.
  std::vector<std::vector<double>> pool;
  pool.push_back(std::vector<double>(geo.dim, 0.0));
  for (const auto& c : geo.cols) {
    pool.push_back(c);
    std::vector<double> neg(c.size());
    for (std::size_t d = 0; d < c.size(); ++d) neg[d] = -c[d];
    pool.push_back(std::move(neg));
  }
  MetricEvaluator me(tree, op.weights());
  double diam = me.diameter_upper();
  for (double frac : {0.5, 0.25, 0.125}) {
    IntervalFamily family = separated_to_intervals(me, frac * diam * 0.5);
    if (family.intervals.empty()) continue;
    Inscription ins = inscribe_identity(op, family);
    for (const auto& zv : ins.z) {
      std::vector<double> dense(geo.dim, 0.0);
      for (auto [r, v] : zv) dense[static_cast<std::size_t>(r)] = 0.5 * v;  // ||y/2||_1 <= 1
      pool.push_back(dense);
      std::vector<double> neg(dense.size());
      for (std::size_t d = 0; d < dense.size(); ++d) neg[d] = -dense[d];
      pool.push_back(std::move(neg));
    }
  }
  out.lower = packing_lower_bound(geo, pool, balls + 1);
  return out;
}

double schuett_shape(long long m, long long n, double q) {
  if (!(q > 1.0)) throw std::invalid_argument("schuett_shape: q must exceed 1");
  if (!(static_cast<double>(n) >= std::log(static_cast<double>(m))) || n > m)
    throw std::out_of_range("schuett_shape: need log m <= n <= m");
  double qp = q / (q - 1.0);
  return std::pow(std::log1p(static_cast<double>(m) / static_cast<double>(n)) /
                      static_cast<double>(n),
                  1.0 / qp);
}

}  // namespace treesum
