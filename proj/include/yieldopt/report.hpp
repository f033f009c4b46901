#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "yieldopt/optimize.hpp"

namespace yieldopt {

/// One row per RunRecord entry:
///   strategy,iteration,kind,n_samples,yield,sigma,grad_norm,cum_yield_evals,
///   cum_qoi_evals,cum_full_model_evals,p1..pn,d1..dm,step_norm,steepest_fallback
void write_iterations_csv(std::ostream& out, const std::vector<RunRecord>& records);

/// Final yields, optima, status and total counters per strategy.
void write_summary_json(std::ostream& out, const std::vector<RunRecord>& records, std::uint64_t seed);

/// Yield against cumulative true-model evaluations, for convergence plots.
void write_plot_csv(std::ostream& out, const std::vector<RunRecord>& records);

/// Shortest round-trip decimal for a double ("nan" for NaN).
std::string format_real(double value);

}  // namespace yieldopt
