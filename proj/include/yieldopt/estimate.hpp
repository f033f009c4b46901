#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "yieldopt/gpr.hpp"
#include "yieldopt/qoi.hpp"
#include "yieldopt/uq.hpp"

namespace yieldopt {

/// Moments of the MC samples that fell inside the safe domain. The
/// covariance uses the population convention (divide by count). Mean and
/// covariance are only meaningful when `defined` (count >= 2).
struct AcceptedStatistics {
  std::size_t count = 0;
  Vector mean;
  Matrix covariance;
  bool defined = false;
};

struct YieldEstimate {
  double value = 0.0;
  std::size_t n_samples = 0;
  double sigma = 0.0;
  AcceptedStatistics accepted;
  /// (sample, grid point) classifications performed.
  std::uint64_t qoi_evals = 0;
  /// Calls of the true QoI model.
  std::uint64_t full_model_evals = 0;
};

/// sqrt(y (1 - y) / n).
double sigma_mc(double y, std::size_t n);

/// Sample size at which the worst case y = 1/2 reaches sigma_mc <= sigma_max.
std::size_t worst_case_sample_size(double sigma_max);

/// Truncated-Gaussian draws stored as offsets from the mean they were drawn
/// at (one column per sample). Replaying the offsets around another mean is
/// how line searches and finite differences get common random numbers.
struct SampleSet {
  Vector mean;
  Matrix offsets;

  std::size_t size() const { return static_cast<std::size_t>(offsets.cols()); }
  Vector point(std::size_t i) const { return mean + offsets.col(static_cast<Eigen::Index>(i)); }
  SampleSet recentered(const Vector& new_mean) const { return {new_mean, offsets}; }
};

SampleSet draw_samples(const UncertainSpec& uspec, std::size_t n, RngStream stream);

/// Per-sample safe-domain indicators for one sample set at one d.
struct Classification {
  std::vector<std::uint8_t> inside;
  /// Samples whose indicator came from the true model.
  std::vector<std::uint8_t> true_evaluated;
  /// Samples the hybrid rule flagged as critical (a subset of true_evaluated).
  std::vector<std::uint8_t> critical;
  std::uint64_t qoi_evals = 0;
  std::uint64_t full_model_evals = 0;
};

/// Builds the yield estimate and accepted-set moments from indicators.
YieldEstimate summarize(const Classification& classification, const SampleSet& samples);

/// Turns a sample set into safe-domain indicators. Implementations may keep
/// state between calls (the hybrid surrogate does), so classify is non-const.
class IndicatorClassifier {
 public:
  virtual ~IndicatorClassifier() = default;
  virtual Classification classify(const PerformanceSpec& spec, const SampleSet& samples,
                                   const Vector& d) = 0;
};

/// Classic MC: every sample is checked with the true model at every grid point.
class MonteCarloClassifier final : public IndicatorClassifier {
 public:
  explicit MonteCarloClassifier(const QoiModel& model) : model_(model) {}
  Classification classify(const PerformanceSpec& spec, const SampleSet& samples,
                          const Vector& d) override;

 private:
  const QoiModel& model_;
};

struct HybridSettings {
  double gamma = 3.0;
  std::size_t initial_design_size = 20;
  /// Keep the surrogate between classify calls and feed it the true-model
  /// values of critical samples. When false every call starts from a fresh
  /// initial design.
  bool persistent = false;
  std::size_t max_training = 300;
  /// Length-scale floors for the uncertain and deterministic input blocks.
  double uncertain_length_floor = 1e-3;
  double deterministic_length_floor = 1.0;
};

/// Surrogate-accelerated classification. One Gaussian process per grid point
/// over the inputs (p, d). A grid point is decided when
/// |mean - threshold| > gamma * stddev. A sample is critical, and evaluated
/// with the true model at every grid point, when no grid point is decidedly
/// violated and at least one is undecided.
class HybridClassifier final : public IndicatorClassifier {
 public:
  HybridClassifier(const QoiModel& model, HybridSettings settings);
  Classification classify(const PerformanceSpec& spec, const SampleSet& samples,
                          const Vector& d) override;

  std::size_t training_size() const { return static_cast<std::size_t>(inputs_.rows()); }
  const std::vector<GprSurrogate>& surrogates() const { return surrogates_; }

 private:
  void append_training(const Matrix& inputs, const Matrix& targets);
  void refit(Eigen::Index n_uncertain);

  const QoiModel& model_;
  HybridSettings settings_;
  Matrix inputs_;
  Matrix targets_;
  std::vector<GprSurrogate> surrogates_;
};

/// Monte Carlo estimate together with the samples and indicators it used.
struct EstimateResult {
  YieldEstimate estimate;
  SampleSet samples;
  Classification classification;
};

EstimateResult estimate_yield_mc(const QoiModel& model, const PerformanceSpec& spec,
                                 const UncertainSpec& uspec, const Vector& d, std::size_t n,
                                 RngStream stream);

EstimateResult estimate_yield_hybrid(const QoiModel& model, const PerformanceSpec& spec,
                                     const UncertainSpec& uspec, const Vector& d, std::size_t n,
                                     RngStream stream, double gamma,
                                     std::size_t initial_design_size);

}  // namespace yieldopt
