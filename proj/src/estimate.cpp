#include "yieldopt/estimate.hpp"

#include <cmath>

#include "yieldopt/errors.hpp"

namespace yieldopt {

double sigma_mc(double y, std::size_t n) {
  if (!(y >= 0.0 && y <= 1.0)) {
    throw ConfigurationError("yield must lie in [0, 1]");
  }
  if (n == 0) {
    throw ConfigurationError("sample count must be positive");
  }
  return std::sqrt(y * (1.0 - y) / static_cast<double>(n));
}

std::size_t worst_case_sample_size(double sigma_max) {
  if (!(sigma_max > 0.0)) {
    throw ConfigurationError("sigma_max must be positive");
  }
  // 0.25 / 0.01^2 evaluates to 2500.0000000000005 in binary floating point.
  const double exact = 0.25 / (sigma_max * sigma_max);
  return static_cast<std::size_t>(std::ceil(exact * (1.0 - 1e-12)));
}

SampleSet draw_samples(const UncertainSpec& uspec, std::size_t n, RngStream stream) {
  return {uspec.mean(), sample_truncated_offsets(uspec, n, stream)};
}

YieldEstimate summarize(const Classification& classification, const SampleSet& samples) {
  const std::size_t n = samples.size();
  if (classification.inside.size() != n) {
    throw ConfigurationError("classification does not match the sample set");
  }
  YieldEstimate est;
  est.n_samples = n;
  est.qoi_evals = classification.qoi_evals;
  est.full_model_evals = classification.full_model_evals;

  const auto dim = samples.mean.size();
  Vector sum = Vector::Zero(dim);
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (classification.inside[i]) {
      sum += samples.offsets.col(static_cast<Eigen::Index>(i));
      ++count;
    }
  }
  est.value = static_cast<double>(count) / static_cast<double>(n);
  est.sigma = sigma_mc(est.value, n);

  AcceptedStatistics& acc = est.accepted;
  acc.count = count;
  acc.mean = samples.mean;
  acc.covariance = Matrix::Zero(dim, dim);
  acc.defined = count >= 2;
  if (count > 0) {
    const Vector mean_offset = sum / static_cast<double>(count);
    for (std::size_t i = 0; i < n; ++i) {
      if (classification.inside[i]) {
        const Vector centered = samples.offsets.col(static_cast<Eigen::Index>(i)) - mean_offset;
        acc.covariance.noalias() += centered * centered.transpose();
      }
    }
    acc.covariance /= static_cast<double>(count);
    acc.mean = samples.mean + mean_offset;
  }
  return est;
}

Classification MonteCarloClassifier::classify(const PerformanceSpec& spec,
                                              const SampleSet& samples, const Vector& d) {
  const std::size_t n = samples.size();
  Classification out;
  out.inside.assign(n, 0);
  out.true_evaluated.assign(n, 1);
  out.critical.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    out.inside[i] = is_in_safe_domain(model_, spec, samples.point(i), d).inside ? 1 : 0;
  }
  out.qoi_evals = static_cast<std::uint64_t>(n) * spec.grid.size();
  out.full_model_evals = out.qoi_evals;
  return out;
}

EstimateResult estimate_yield_mc(const QoiModel& model, const PerformanceSpec& spec,
                                 const UncertainSpec& uspec, const Vector& d, std::size_t n,
                                 RngStream stream) {
  EstimateResult result;
  result.samples = draw_samples(uspec, n, stream);
  MonteCarloClassifier classifier(model);
  result.classification = classifier.classify(spec, result.samples, d);
  result.estimate = summarize(result.classification, result.samples);
  return result;
}

}  // namespace yieldopt
