#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "treesum/rates.hpp"

namespace treesum {

/// Parameters for one CLI experiment. JSON config files mirror these fields;
/// command line flags override file values.
struct ExperimentConfig {
  std::string mode = "covering";  // covering|biased|binary-log|gaussian|op-checks|predict
  std::string tree = "biased";    // path|binary|moderate|biased
  int lambda = 1;
  int depth = 64;
  std::string law = "polynomial";  // polynomial|exponential
  double gamma = 2.5;
  double q = 2.0;
  double eps_start = 0.5;
  double eps_ratio = 0.7071067811865476;
  int eps_count = 12;
  long long samples = 100000;
  std::uint64_t seed = 1;
  std::string out = "out";
  int exact_limit = 512;
  double c_star = 8.0;

  void validate() const;
  std::string to_json() const;
  static ExperimentConfig from_json(const std::string& text);
  std::uint64_t hash() const;
  std::vector<double> eps_grid() const;
};

struct ExperimentResult {
  bool pass = true;
  bool report_only = false;
  std::string summary;
  std::string json;  // full result document
};

/// Runs the configured experiment and writes counts.csv, result.json and
/// loglog.dat under config.out. Returns the result document.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Tolerances for fitted-exponent comparisons, per mode. Constants are
/// uncontrolled, so pass/fail always compares exponents only.
double mode_tolerance(const std::string& mode);

}  // namespace treesum
