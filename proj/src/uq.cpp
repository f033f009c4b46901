#include "yieldopt/uq.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "yieldopt/errors.hpp"

namespace yieldopt {

namespace {

// Proposals are checked against the acceptance floor only once this many
// have been made, so short unlucky runs do not trip the error.
constexpr std::size_t kMinProposalsBeforeCheck = 10000;
constexpr double kMinAcceptanceRate = 1e-3;

}  // namespace

UncertainSpec::UncertainSpec(Vector mean, Matrix covariance, Vector truncation_halfwidth)
    : mean_(std::move(mean)),
      covariance_(std::move(covariance)),
      halfwidth_(std::move(truncation_halfwidth)) {
  const auto n = mean_.size();
  if (n == 0) {
    throw ConfigurationError("uncertain mean must have at least one entry");
  }
  if (covariance_.rows() != n || covariance_.cols() != n) {
    throw ConfigurationError("covariance must be " + std::to_string(n) + "x" + std::to_string(n));
  }
  if (halfwidth_.size() != n) {
    throw ConfigurationError("truncation halfwidth must have " + std::to_string(n) + " entries");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(halfwidth_[i] > 0.0)) {
      throw ConfigurationError("truncation halfwidth must be positive");
    }
  }
  const double scale = std::max(1.0, covariance_.cwiseAbs().maxCoeff());
  if ((covariance_ - covariance_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw ConfigurationError("covariance must be symmetric");
  }
  Eigen::LLT<Matrix> llt(covariance_);
  if (llt.info() != Eigen::Success) {
    throw ConfigurationError("covariance must be positive definite");
  }
  chol_ = llt.matrixL();
  precision_ = llt.solve(Matrix::Identity(n, n));
  precision_ = 0.5 * (precision_ + precision_.transpose()).eval();
  log_det_ = 2.0 * chol_.diagonal().array().log().sum();
}

UncertainSpec::UncertainSpec(Vector mean, Matrix covariance, double truncation_halfwidth)
    : UncertainSpec(mean, std::move(covariance),
                    Vector::Constant(mean.size(), truncation_halfwidth)) {}

UncertainSpec UncertainSpec::with_mean(Vector mean) const {
  if (mean.size() != mean_.size()) {
    throw ConfigurationError("mean dimension mismatch");
  }
  UncertainSpec copy = *this;
  copy.mean_ = std::move(mean);
  return copy;
}

Rng::Rng(RngStream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(stream.seed), static_cast<std::uint32_t>(stream.seed >> 32),
                    static_cast<std::uint32_t>(stream.stream_id),
                    static_cast<std::uint32_t>(stream.stream_id >> 32), 0x9e3779b9u};
  engine_.seed(seq);
}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double factor = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * factor;
  has_spare_ = true;
  return u * factor;
}

double gaussian_pdf(const UncertainSpec& spec, const UncertainSample& point) {
  if (point.values.size() != spec.dimension()) {
    throw ConfigurationError("sample dimension does not match the uncertain spec");
  }
  const Vector diff = point.values - spec.mean();
  const Vector whitened = spec.cholesky_factor().triangularView<Eigen::Lower>().solve(diff);
  const double n = static_cast<double>(spec.dimension());
  return std::exp(-0.5 * whitened.squaredNorm() - 0.5 * n * std::log(2.0 * std::numbers::pi) -
                  0.5 * spec.log_determinant());
}

Matrix sample_truncated_offsets(const UncertainSpec& spec, std::size_t n, RngStream stream) {
  if (n == 0) {
    throw ConfigurationError("sample count must be positive");
  }
  const auto dim = spec.dimension();
  Matrix offsets(dim, static_cast<Eigen::Index>(n));
  Rng rng(stream);
  Vector z(dim);
  std::size_t accepted = 0;
  std::size_t proposals = 0;
  while (accepted < n) {
    for (Eigen::Index i = 0; i < dim; ++i) {
      z[i] = rng.normal();
    }
    const Vector offset = spec.cholesky_factor() * z;
    ++proposals;
    if ((offset.cwiseAbs().array() <= spec.truncation_halfwidth().array()).all()) {
      offsets.col(static_cast<Eigen::Index>(accepted++)) = offset;
    } else if (proposals >= kMinProposalsBeforeCheck &&
               static_cast<double>(accepted) < kMinAcceptanceRate * static_cast<double>(proposals)) {
      throw DegenerateTruncationError("truncation box accepts fewer than 1 in 1000 proposals");
    }
  }
  return offsets;
}

std::vector<UncertainSample> sample_truncated(const UncertainSpec& spec, std::size_t n,
                                              RngStream stream) {
  const Matrix offsets = sample_truncated_offsets(spec, n, stream);
  std::vector<UncertainSample> samples;
  samples.reserve(n);
  for (Eigen::Index j = 0; j < offsets.cols(); ++j) {
    samples.push_back({spec.mean() + offsets.col(j)});
  }
  return samples;
}

double standard_normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

double standard_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

}  // namespace yieldopt
