#pragma once

#include <optional>
#include <string>
#include <vector>

#include "yieldopt/errors.hpp"
#include "yieldopt/optimize.hpp"
#include "yieldopt/qoi.hpp"

namespace yieldopt {

/// Invalid harness configuration; what() names the offending section.key.
class ConfigError : public ConfigurationError {
 public:
  using ConfigurationError::ConfigurationError;
};

enum class ProblemKind { waveguide, halfspace_oracle, shifted_oracle };

std::string to_string(ProblemKind kind);

/// Fully resolved harness configuration. Defaults reproduce the waveguide
/// benchmark setup.
struct HarnessConfig {
  ProblemKind problem = ProblemKind::waveguide;
  WaveguideConfig waveguide;
  Vector oracle_normal;
  double oracle_offset = 0.0;
  Vector oracle_weights;
  Vector initial_deterministic;

  Vector mean;
  Matrix covariance;
  Vector truncation;

  double threshold = -24.0;
  std::vector<double> grid;

  OptimizerConfig optimizer;
  std::vector<Strategy> strategies;

  std::string output_dir = "out";
  bool write_plot = true;

  YieldProblem build_problem() const;
};

/// Parses the flat sectioned key = value format:
///
///   # comment
///   [problem]   kind, width_mm, chi_e, chi_m, db_floor, deterministic,
///               normal, offset, deterministic_weights
///   [uncertain] mean, covariance, truncation
///   [spec]      threshold, grid
///   [optimizer] sigma_max, n_initial, n_max, max_iterations, ...
///   [output]    dir, plot
///
/// Unknown sections or keys, type mismatches and invariant violations throw
/// ConfigError. `source` is used in diagnostics.
HarnessConfig parse_config(const std::string& text, const std::string& source = "<config>");

/// Reads and validates a config file.
HarnessConfig validate_config(const std::string& path);

/// Parses "first:last:count UNIT" (UNIT in GHz, MHz, Hz, rad/s) into angular
/// frequencies in rad/s; frequency units are multiplied by 2 pi.
std::vector<double> parse_grid(const std::string& text);

/// Human-readable table of every resolved parameter.
std::string describe(const HarnessConfig& config);

}  // namespace yieldopt
