#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "yieldopt/deriv.hpp"
#include "yieldopt/estimate.hpp"
#include "yieldopt/qoi.hpp"

namespace yieldopt {

struct OptimizerConfig {
  double sigma_max = 0.01;
  std::size_t n_initial = 100;
  std::size_t n_max = 2500;
  std::size_t max_iterations = 50;
  double gradient_tolerance = 1e-3;
  double step_tolerance = 1e-6;
  double armijo_c1 = 1e-4;
  double backtrack_factor = 0.5;
  std::size_t max_backtracks = 20;
  double angle_threshold = 1e-4;
  /// Longest step the line search starts from, in (mean, d) coordinates.
  double max_step_norm = 1.0;
  /// Empty means default_fd_steps(d) at every iteration.
  Vector fd_steps;
  HybridSettings hybrid;
  std::size_t nm_max_evaluations = 200;
  double nm_diameter_tolerance = 1e-3;
  std::uint64_t seed = 0;

  /// Throws ConfigurationError naming the offending field.
  void validate() const;
};

/// Everything one optimization run needs. The model is shared read-only.
struct YieldProblem {
  std::shared_ptr<const QoiModel> model;
  PerformanceSpec spec;
  /// Covariance and truncation; its mean is the initial uncertain mean.
  UncertainSpec uncertain;
  Vector initial_deterministic;

  DesignPoint initial_point() const { return {uncertain.mean(), initial_deterministic}; }

  /// Model admissibility of the whole truncation box around the point.
  bool admissible(const DesignPoint& point) const;
};

enum class RunStatus { converged, max_iterations, degenerate, failed };

std::string to_string(RunStatus status);

enum class EntryKind { iteration, evaluation, final_estimate };

struct IterationRecord {
  std::size_t iteration = 0;
  EntryKind kind = EntryKind::iteration;
  DesignPoint point;
  double yield = 0.0;
  double sigma = 0.0;
  std::size_t n_samples = 0;
  /// NaN where no gradient is computed (DFO evaluations, final estimate).
  double grad_norm = 0.0;
  double step_norm = 0.0;
  bool steepest_fallback = false;
  double regularization = 0.0;
  std::uint64_t cum_yield_evals = 0;
  std::uint64_t cum_qoi_evals = 0;
  std::uint64_t cum_full_model_evals = 0;
};

struct RunRecord {
  std::string strategy;
  std::vector<IterationRecord> entries;
  RunStatus status = RunStatus::failed;
  std::string message;
  DesignPoint optimum;
  /// Re-estimate at n_max at the optimum, with the run's own estimator.
  YieldEstimate final_estimate;

  std::uint64_t total_yield_evals() const;
  std::uint64_t total_qoi_evals() const;
  std::uint64_t total_full_model_evals() const;
};

/// Sample size used by the fixed-size Newton driver.
std::size_t non_adaptive_sample_size(const OptimizerConfig& config);

/// Derives the stream used by a strategy at a given iteration.
RngStream strategy_stream(std::uint64_t seed, std::uint32_t strategy, std::uint32_t index);

struct NewtonOptions {
  bool adaptive = false;
  bool hybrid = false;
  std::uint32_t strategy_index = 2;
  std::string name = "newton";
};

/// Globalized Newton ascent on the yield with the mixed derivative strategy:
/// analytic gradient/Hessian in the uncertain means, central differences in
/// the deterministic variables, and a full-space BFGS matrix for the
/// remaining Hessian blocks.
RunRecord newton_mixed(const YieldProblem& problem, const OptimizerConfig& config,
                       const NewtonOptions& options);

/// Nelder-Mead on (mean, d) maximizing the MC yield at N = n_max with one
/// fixed set of draws replayed around every vertex.
RunRecord nelder_mead_reference(const YieldProblem& problem, const OptimizerConfig& config,
                                std::uint32_t strategy_index = 1);

/// Derivative-free minimization core, exposed for testing.
struct NelderMeadResult {
  Vector best;
  double best_value = 0.0;
  std::size_t evaluations = 0;
  bool converged = false;
};

NelderMeadResult nelder_mead_minimize(const std::function<double(const Vector&)>& objective,
                                      const Vector& start, std::size_t max_evaluations,
                                      double diameter_tolerance);

enum class Strategy { v1_dfo_ref, v2_mix_na, v3_mix_a, v4_mix_ha };

std::string strategy_name(Strategy s);
/// Accepts "v1" or "V1dfo-ref" style names.
Strategy parse_strategy(const std::string& text);

/// Runs the selected strategies under one master seed (config.seed). A
/// failing strategy is recorded with status `failed`; the others still run.
std::vector<RunRecord> compare_strategies(const YieldProblem& problem,
                                          const OptimizerConfig& config,
                                          const std::vector<Strategy>& strategies);

}  // namespace yieldopt
