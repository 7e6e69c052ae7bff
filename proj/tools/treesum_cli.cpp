// Experiment driver: covering sweeps, rate fits and prediction tables for
// weighted summation operators on trees.

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "treesum/experiment.hpp"
#include "treesum/version.hpp"

namespace {

void add_common_flags(CLI::App* cmd, treesum::ExperimentConfig& config, std::string& config_path) {
  cmd->add_option("--config", config_path, "JSON config file; flags override its values");
  cmd->add_option("--tree", config.tree, "tree kind: path|binary|moderate|biased");
  cmd->add_option("--lambda", config.lambda, "generation growth order");
  cmd->add_option("--depth", config.depth, "materialized depth");
  cmd->add_option("--law", config.law, "weight law: polynomial|exponential");
  cmd->add_option("--gamma", config.gamma, "weight decay exponent");
  cmd->add_option("--q", config.q, "target lq exponent");
  cmd->add_option("--eps-start", config.eps_start, "largest epsilon of the grid");
  cmd->add_option("--eps-ratio", config.eps_ratio, "geometric grid ratio in (0,1)");
  cmd->add_option("--eps-count", config.eps_count, "grid length");
  cmd->add_option("--samples", config.samples, "Monte Carlo sample count");
  cmd->add_option("--seed", config.seed, "rng seed");
  cmd->add_option("--out", config.out, "output directory");
  cmd->add_option("--exact-limit", config.exact_limit, "candidate cap for exact covers");
  cmd->add_option("--c-star", config.c_star, "starting constant for biased nets");
}

treesum::ExperimentConfig merge_config(const CLI::App* cmd, treesum::ExperimentConfig flags,
                                       const std::string& config_path, const std::string& mode) {
  treesum::ExperimentConfig merged;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw std::runtime_error("cannot open config file: " + config_path);
    std::stringstream buf;
    buf << in.rdbuf();
    merged = treesum::ExperimentConfig::from_json(buf.str());
  }
  auto take = [&](const std::string& name, auto member) {
    if (cmd->count(name) > 0) merged.*member = flags.*member;
  };
  take("--tree", &treesum::ExperimentConfig::tree);
  take("--lambda", &treesum::ExperimentConfig::lambda);
  take("--depth", &treesum::ExperimentConfig::depth);
  take("--law", &treesum::ExperimentConfig::law);
  take("--gamma", &treesum::ExperimentConfig::gamma);
  take("--q", &treesum::ExperimentConfig::q);
  take("--eps-start", &treesum::ExperimentConfig::eps_start);
  take("--eps-ratio", &treesum::ExperimentConfig::eps_ratio);
  take("--eps-count", &treesum::ExperimentConfig::eps_count);
  take("--samples", &treesum::ExperimentConfig::samples);
  take("--seed", &treesum::ExperimentConfig::seed);
  take("--out", &treesum::ExperimentConfig::out);
  take("--exact-limit", &treesum::ExperimentConfig::exact_limit);
  take("--c-star", &treesum::ExperimentConfig::c_star);
  if (config_path.empty()) {
    merged = flags;
  }
  merged.mode = mode;
  return merged;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"weighted summation operators on trees: covering, nets, rates"};
  app.set_version_flag("--version", treesum::kVersion);
  app.require_subcommand(1);

  struct SubState {
    treesum::ExperimentConfig config;
    std::string config_path;
    CLI::App* cmd = nullptr;
  };
  std::map<std::string, SubState> subs;
  for (const auto& mode :
       {"covering", "biased", "binary-log", "gaussian", "op-checks", "predict"}) {
    auto& st = subs[mode];
    st.cmd = app.add_subcommand(mode, std::string("run the ") + mode + " experiment");
    add_common_flags(st.cmd, st.config, st.config_path);
  }

  CLI11_PARSE(app, argc, argv);

  for (auto& [mode, st] : subs) {
    if (!st.cmd->parsed()) continue;
    try {
      auto config = merge_config(st.cmd, st.config, st.config_path, mode);
      auto result = treesum::run_experiment(config);
      std::cout << result.json << '\n';
      std::cout << (result.pass ? "PASS" : "FAIL") << ": " << result.summary << '\n';
      return result.pass ? 0 : 1;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return 2;
    }
  }
  return 0;
}
