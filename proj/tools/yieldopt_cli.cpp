// Yield-optimization benchmark harness.
//
//   yieldopt run --config bench.toml [--strategies v1,v2] [--seed 7] [--out DIR] [--dry-run]
//
// Exit codes: 0 success, 1 at least one strategy failed, 2 invalid config.

#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "yieldopt/config.hpp"
#include "yieldopt/report.hpp"

namespace {

constexpr int kExitPartialFailure = 1;
constexpr int kExitInvalidConfig = 2;

std::vector<yieldopt::Strategy> parse_strategy_list(const std::string& text) {
  std::vector<yieldopt::Strategy> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) {
      out.push_back(yieldopt::parse_strategy(item));
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Yield estimation and optimization under Gaussian manufacturing uncertainty"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run the selected optimization strategies");
  std::string config_path;
  std::string strategies;
  std::uint64_t seed = 0;
  std::string out_dir;
  bool dry_run = false;
  run->add_option("--config", config_path, "config file (flat [section] key = value)")->required();
  auto* strategies_opt = run->add_option("--strategies", strategies, "comma-separated subset of v1,v2,v3,v4");
  auto* seed_opt = run->add_option("--seed", seed, "master seed");
  auto* out_opt = run->add_option("--out", out_dir, "output directory");
  run->add_flag("--dry-run", dry_run, "validate the config and print the resolved parameters");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalidConfig;
  }

  yieldopt::HarnessConfig config;
  try {
    config = yieldopt::validate_config(config_path);
    if (strategies_opt->count() > 0) {
      config.strategies = parse_strategy_list(strategies);
      if (config.strategies.empty()) {
        throw yieldopt::ConfigError("--strategies: must name at least one strategy");
      }
    }
    if (seed_opt->count() > 0) {
      config.optimizer.seed = seed;
    }
    if (out_opt->count() > 0) {
      config.output_dir = out_dir;
    }
    (void)config.build_problem();
  } catch (const std::exception& e) {
    std::cerr << "invalid config: " << e.what() << "\n";
    return kExitInvalidConfig;
  }

  if (dry_run) {
    std::cout << yieldopt::describe(config);
    return 0;
  }

  const yieldopt::YieldProblem problem = config.build_problem();
  const auto records = yieldopt::compare_strategies(problem, config.optimizer, config.strategies);

  std::filesystem::create_directories(config.output_dir);
  const std::filesystem::path dir(config.output_dir);
  {
    std::ofstream csv(dir / "iterations.csv");
    yieldopt::write_iterations_csv(csv, records);
  }
  {
    std::ofstream json(dir / "summary.json");
    yieldopt::write_summary_json(json, records, config.optimizer.seed);
  }
  if (config.write_plot) {
    std::ofstream plot(dir / "convergence.csv");
    yieldopt::write_plot_csv(plot, records);
  }

  bool any_failed = false;
  for (const auto& r : records) {
    std::cout << r.strategy << ": status=" << yieldopt::to_string(r.status)
              << " final_yield=" << yieldopt::format_real(r.final_estimate.value)
              << " yield_evals=" << r.total_yield_evals()
              << " full_model_evals=" << r.total_full_model_evals();
    if (!r.message.empty()) {
      std::cout << " (" << r.message << ")";
    }
    std::cout << "\n";
    any_failed = any_failed || r.status == yieldopt::RunStatus::failed;
  }
  return any_failed ? kExitPartialFailure : 0;
}
