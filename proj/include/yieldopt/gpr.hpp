#pragma once

#include "yieldopt/uq.hpp"

namespace yieldopt {

/// Squared-exponential kernel
///   k(x, x') = signal_variance * exp(-1/2 sum_j ((x_j - x'_j) / length_scales_j)^2)
/// with a constant prior mean. `jitter` is relative to the signal variance.
struct GprHyperparameters {
  double signal_variance = 1.0;
  Vector length_scales;
  double jitter = 1e-8;
  double prior_mean = 0.0;
};

struct GprPrediction {
  double mean = 0.0;
  double stddev = 0.0;
};

/// Exact Gaussian-process posterior over a fixed training set.
class GprSurrogate {
 public:
  /// inputs: one training point per row.
  GprSurrogate(Matrix inputs, Vector targets, GprHyperparameters hyper);

  GprPrediction predict(const VectorRef& query) const;

  const Matrix& inputs() const { return inputs_; }
  const Vector& targets() const { return targets_; }
  const GprHyperparameters& hyperparameters() const { return hyper_; }
  /// Jitter actually used after escalation.
  double effective_jitter() const { return jitter_; }

 private:
  double kernel(const VectorRef& a, const VectorRef& b) const;

  Matrix inputs_;
  Vector targets_;
  GprHyperparameters hyper_;
  Vector inv_length_;
  double jitter_ = 0.0;
  Eigen::LLT<Matrix> llt_;
  Vector alpha_;
};

GprSurrogate fit_gpr(Matrix inputs, Vector targets, GprHyperparameters hyper);

/// Deterministic hyperparameters: per-dimension length scale = median of
/// pairwise |x_j - x'_j| (floored by length_floor_j), signal variance = target
/// variance, prior mean = target mean.
GprHyperparameters median_heuristic(const Matrix& inputs, const Vector& targets,
                                    const Vector& length_floor);

}  // namespace yieldopt
