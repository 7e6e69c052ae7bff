#pragma once

#include <optional>
#include <string>
#include <vector>

namespace treesum {

enum class TreeFamily { path, moderate, binary, biased };
enum class WeightFamily { polynomial, exponential };

struct PredictParams {
  TreeFamily family = TreeFamily::moderate;
  WeightFamily law = WeightFamily::polynomial;
  double q = 2.0;
  double gamma = 2.0;
  int lambda = 1;  // generation growth order for moderate/biased trees
};

/// Entropy rate n^{-power} (log n)^{log_power}.
struct EntropyRate {
  double power = 0.0;
  double log_power = 0.0;
};

/// Covering and entropy exponents the theory predicts for the parameters.
/// covering: N(eps) ~ eps^-a |log eps|^b, or log N(eps) ~ eps^-a when
/// stretched. Entropy upper rates use p = min(2, q); lower rates use q', so
/// for q > 2 the two differ and q_gap is set. Critical parameter boundaries
/// are flagged and carry both neighboring covering exponents; experiments
/// treat them as report-only.
struct RatePrediction {
  std::string source;
  bool stretched = false;
  double covering_a = 0.0;
  double covering_b = 0.0;
  EntropyRate entropy_upper;
  EntropyRate entropy_lower;
  bool critical = false;
  std::string critical_note;
  std::optional<double> neighbor_below_a;
  std::optional<double> neighbor_above_a;
  bool q_gap = false;
};

RatePrediction predict(const PredictParams& params);

/// Entropy rate implied by a power-law covering bound N <= eps^-a |log eps|^b
/// (upper direction, type-p convex hull route) or >= (lower direction).
EntropyRate entropy_from_power_covering(double a, double b, double q, bool upper);
/// Same for stretched covering bounds log N ~ eps^-a; the boundary a = p'
/// (respectively q') is the critical case.
EntropyRate entropy_from_stretched_covering(double a, double q, bool upper, bool& critical);

// --- rate fitting -----------------------------------------------------------

enum class FitModel { power, stretched };

struct FitPoint {
  double epsilon = 0.0;
  double value = 0.0;  // N-like for power, log N-like for stretched
  bool usable = true;
};

struct RateFit {
  FitModel model = FitModel::power;
  double a = 0.0;
  double b = 0.0;  // forced to fix_b when given
  double c0 = 0.0;
  double r_squared = 0.0;
  std::vector<double> residuals;
  int n_used = 0;
};

/// Least squares of log(value) on log(1/eps) [, log log(1/eps)] for the power
/// model, or of log(value) on log(1/eps) for the stretched model where value
/// is already a logarithm. Needs >= 6 usable points spanning two decades of
/// value; throws with diagnostics otherwise.
RateFit fit_rate(const std::vector<FitPoint>& points, FitModel model,
                 std::optional<double> fix_b = std::nullopt);

}  // namespace treesum
