#include "treesum/rates.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "treesum/util.hpp"

namespace treesum {

EntropyRate entropy_from_power_covering(double a, double b, double q, bool upper) {
  double p = upper ? std::min(2.0, q) : q;
  double conj = p / (p - 1.0);
  return {1.0 / a + 1.0 / conj, b / a};
}

EntropyRate entropy_from_stretched_covering(double a, double q, bool upper, bool& critical) {
  double p = upper ? std::min(2.0, q) : q;
  double conj = p / (p - 1.0);
  critical = upper && nearly_equal(a, conj, 1e-9);
  if (critical) return {1.0 / a, 1.0};  // weaker route, extra log factor
  if (a < conj) return {1.0 / conj, 1.0 / conj - 1.0 / a};
  return {1.0 / a, 0.0};
}

namespace {

RatePrediction predict_moderate(const PredictParams& p) {
  RatePrediction r;
  const double q = p.q, g = p.gamma;
  const auto L = static_cast<double>(p.lambda);
  double below = p.lambda > 0 ? q * L / (g - 1.0) : q * (L + 1.0) / g;
  double above = q * (L + 1.0) / g;
  if (nearly_equal(g, L + 1.0, 1e-9)) {
    r.source = "moderate tree, boundary gamma = lambda + 1";
    r.covering_a = q;
    r.covering_b = 1.0;
    r.critical = true;
    r.critical_note = "boundary between the convergent and divergent regimes; report-only";
    r.neighbor_below_a = below;
    r.neighbor_above_a = above;
  } else if (g > L + 1.0) {
    r.source = "moderate tree, convergent regime (gamma > lambda + 1)";
    r.covering_a = above;
  } else {
    r.source = "moderate tree, divergent regime (gamma < lambda + 1)";
    r.covering_a = below;
  }
  r.entropy_upper = entropy_from_power_covering(r.covering_a, r.covering_b, q, true);
  r.entropy_lower = entropy_from_power_covering(r.covering_a, r.covering_b, q, false);
  return r;
}

RatePrediction predict_binary_polynomial(const PredictParams& p) {
  RatePrediction r;
  const double q = p.q, g = p.gamma;
  r.stretched = true;
  r.covering_a = q / (g - 1.0);
  r.source = "binary tree, polynomial weights (stretched covering growth)";
  bool crit_up = false;
  r.entropy_upper = entropy_from_stretched_covering(r.covering_a, q, true, crit_up);
  bool crit_lo = false;
  r.entropy_lower = entropy_from_stretched_covering(r.covering_a, q, false, crit_lo);
  if (crit_up) {
    r.critical = true;
    double pp = std::min(2.0, q) / (std::min(2.0, q) - 1.0);
    r.critical_note = "stretched exponent hits p' = " + std::to_string(pp) +
                      "; only the log-weakened upper rate is available";
  }
  return r;
}

RatePrediction predict_binary_exponential(const PredictParams& p) {
  RatePrediction r;
  const double q = p.q, g = p.gamma;
  r.source = "binary tree, exponential weights";
  r.covering_a = q / g;
  r.entropy_upper = entropy_from_power_covering(r.covering_a, 0.0, q, true);
  r.entropy_lower = entropy_from_power_covering(r.covering_a, 0.0, q, false);
  return r;
}

RatePrediction predict_biased(const PredictParams& p) {
  RatePrediction r;
  const double q = p.q, g = p.gamma;
  const auto L = static_cast<double>(p.lambda);
  r.source = "biased tree (branches die out): no regime split";
  r.covering_a = q * (L + 1.0) / g;
  r.entropy_upper = entropy_from_power_covering(r.covering_a, 0.0, q, true);
  r.entropy_lower = entropy_from_power_covering(r.covering_a, 0.0, q, false);
  return r;
}

}  // namespace

RatePrediction predict(const PredictParams& params) {
  if (!(params.q > 1.0)) throw std::invalid_argument("predict: q must exceed 1");
  if (params.law == WeightFamily::polynomial && !(params.gamma > 1.0))
    throw std::invalid_argument("predict: polynomial weights need gamma > 1");
  if (params.law == WeightFamily::exponential && !(params.gamma > 0.0))
    throw std::invalid_argument("predict: exponential weights need gamma > 0");

  RatePrediction r;
  switch (params.family) {
    case TreeFamily::path: {
      PredictParams p = params;
      p.lambda = 0;
      if (params.law == WeightFamily::exponential)
        throw std::invalid_argument("predict: exponential weights on a path are not covered");
      r = predict_moderate(p);
      r.source = "path (moderate with lambda = 0)";
      break;
    }
    case TreeFamily::moderate:
      if (params.law == WeightFamily::exponential)
        throw std::invalid_argument("predict: exponential weights need the binary family");
      r = predict_moderate(params);
      break;
    case TreeFamily::binary:
      r = params.law == WeightFamily::polynomial ? predict_binary_polynomial(params)
                                                 : predict_binary_exponential(params);
      break;
    case TreeFamily::biased:
      if (params.law == WeightFamily::exponential)
        throw std::invalid_argument("predict: biased trees are analyzed with polynomial weights");
      if (params.lambda < 1)
        throw std::invalid_argument("predict: biased trees need lambda >= 1");
      r = predict_biased(params);
      break;
  }
  r.q_gap = params.q > 2.0 &&
            (!nearly_equal(r.entropy_upper.power, r.entropy_lower.power, 1e-12) ||
             !nearly_equal(r.entropy_upper.log_power, r.entropy_lower.log_power, 1e-12));
  return r;
}

RateFit fit_rate(const std::vector<FitPoint>& points, FitModel model,
                 std::optional<double> fix_b) {
  std::vector<double> x1, x2, y;
  for (const auto& pt : points) {
    if (!pt.usable) continue;
    if (!(pt.epsilon > 0) || !(pt.epsilon < 1.0)) continue;  // log log needs eps < 1
    if (!(pt.value > 0)) continue;
    double l = std::log(1.0 / pt.epsilon);
    x1.push_back(l);
    x2.push_back(std::log(l));
    y.push_back(std::log(pt.value));
  }
  if (x1.size() < 6) {
    std::ostringstream msg;
    msg << "fit_rate: only " << x1.size() << " usable points, need >= 6";
    throw std::invalid_argument(msg.str());
  }
  double vmin = y.front(), vmax = y.front();
  for (double v : y) {
    vmin = std::min(vmin, v);
    vmax = std::max(vmax, v);
  }
  if (vmax - vmin < std::log(100.0)) {
    std::ostringstream msg;
    msg << "fit_rate: fitted quantity spans " << std::exp(vmax - vmin)
        << "x, need two decades";
    throw std::invalid_argument(msg.str());
  }

  RateFit fit;
  fit.model = model;
  fit.n_used = static_cast<int>(x1.size());
  std::vector<double> ones(x1.size(), 1.0);
  std::vector<double> coef;
  bool with_b = model == FitModel::power && !fix_b.has_value();
  if (with_b) {
    coef = lstsq({x1, x2, ones}, y);
    fit.a = coef[0];
    fit.b = coef[1];
    fit.c0 = coef[2];
  } else {
    std::vector<double> rhs = y;
    double b0 = model == FitModel::power ? fix_b.value_or(0.0) : 0.0;
    if (b0 != 0.0)
      for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] -= b0 * x2[i];
    coef = lstsq({x1, ones}, rhs);
    fit.a = coef[0];
    fit.b = b0;
    fit.c0 = coef[1];
  }
  double ss_res = 0.0, ss_tot = 0.0, mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    double pred = fit.a * x1[i] + fit.b * x2[i] + fit.c0;
    fit.residuals.push_back(y[i] - pred);
    ss_res += (y[i] - pred) * (y[i] - pred);
    ss_tot += (y[i] - mean) * (y[i] - mean);
  }
  fit.r_squared = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

}  // namespace treesum
