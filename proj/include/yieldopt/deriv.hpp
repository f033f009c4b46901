#pragma once

#include <cstdint>

#include "yieldopt/estimate.hpp"

namespace yieldopt {

/// Gradient of the yield in (uncertain mean, deterministic) coordinates.
struct GradientBundle {
  Vector d_mean;
  Vector d_det;
  bool degenerate = false;

  Vector concatenated() const;
};

/// Whether the accepted set carries no usable derivative information: fewer
/// than two accepted samples, or every sample accepted.
bool is_degenerate(const YieldEstimate& est);

/// Y * Sigma^-1 (mean_accepted - mean); zero when degenerate.
Vector grad_yield_mean(const YieldEstimate& est, const UncertainSpec& uspec);

/// Y * Sigma^-1 (Sigma_accepted + dm dm^T - Sigma) Sigma^-1 with
/// dm = mean_accepted - mean, symmetrized; zero when degenerate.
Matrix hess_yield_mean(const YieldEstimate& est, const UncertainSpec& uspec);

struct FdGradient {
  Vector gradient;
  std::uint64_t yield_evals = 0;
  std::uint64_t qoi_evals = 0;
  std::uint64_t full_model_evals = 0;
};

/// Default central-difference steps max(1e-3 |d_j|, 1e-3).
Vector default_fd_steps(const Vector& d);

/// Central differences of the MC yield in d, re-classifying the given sample
/// set (common random numbers) at d +/- h_j e_j. No new samples are drawn.
FdGradient fd_grad_det(IndicatorClassifier& classifier, const PerformanceSpec& spec,
                       const SampleSet& samples, const Vector& d, const Vector& steps);

FdGradient fd_grad_det(const QoiModel& model, const PerformanceSpec& spec,
                       const SampleSet& samples, const Vector& d, const Vector& steps);

/// BFGS approximation of the Hessian of the negated yield.
struct BfgsState {
  Matrix hessian_approx;
  Vector prev_point;
  Vector prev_gradient;
  bool has_previous = false;

  static BfgsState identity(Eigen::Index dimension);
};

struct BfgsUpdateResult {
  BfgsState state;
  bool applied = false;
};

/// With x = new_point - prev_point and g = new_gradient - prev_gradient:
///   H+ = H + g g^T / (g^T x) - (H x)(H x)^T / (x^T H x),
/// skipped when g^T x <= 1e-10 |g| |x|. The first call only records the point.
BfgsUpdateResult bfgs_update(const BfgsState& state, const Vector& new_point,
                             const Vector& new_gradient);

struct MixedHessian {
  Matrix matrix;
  double regularization = 0.0;
};

/// BFGS matrix with its leading uncertain block replaced by analytic_pp,
/// symmetrized and shifted by the smallest tau in {0, 1e-8, 1e-6, ...} that
/// makes it positive definite.
MixedHessian assemble_mixed_hessian(const BfgsState& bfgs, const Matrix& analytic_pp);

}  // namespace yieldopt
