#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <vector>

namespace yieldopt {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using VectorRef = Eigen::Ref<const Vector>;

/// Gaussian model of the uncertain design parameters p ~ N(mean, covariance),
/// restricted to the box |p_i - mean_i| <= truncation_halfwidth_i.
///
/// The box is always centered at the current mean, so moving the mean moves
/// the box with it.
class UncertainSpec {
 public:
  UncertainSpec(Vector mean, Matrix covariance, Vector truncation_halfwidth);
  /// Same halfwidth in every coordinate.
  UncertainSpec(Vector mean, Matrix covariance, double truncation_halfwidth);

  const Vector& mean() const { return mean_; }
  const Matrix& covariance() const { return covariance_; }
  const Vector& truncation_halfwidth() const { return halfwidth_; }
  Eigen::Index dimension() const { return mean_.size(); }

  /// Lower Cholesky factor L with L L^T = covariance.
  const Matrix& cholesky_factor() const { return chol_; }
  const Matrix& precision() const { return precision_; }
  double log_determinant() const { return log_det_; }

  /// Copy with a different mean; covariance and halfwidth are kept.
  UncertainSpec with_mean(Vector mean) const;

 private:
  Vector mean_;
  Matrix covariance_;
  Vector halfwidth_;
  Matrix chol_;
  Matrix precision_;
  double log_det_ = 0.0;
};

struct UncertainSample {
  Vector values;
};

/// Identifies one reproducible random stream.
struct RngStream {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
};

/// Portable random source for one RngStream.
///
/// std::mt19937_64 and std::seed_seq are fully specified by the standard; the
/// normal variates come from the Marsaglia polar method on top of a 53-bit
/// uniform, so no implementation-defined distribution object is involved.
class Rng {
 public:
  explicit Rng(RngStream stream);

  /// Uniform on [0, 1).
  double uniform();
  double normal();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Normalized multivariate Gaussian density (truncation is ignored).
double gaussian_pdf(const UncertainSpec& spec, const UncertainSample& point);

/// Draws n offsets p - mean (one per column) by rejection from the
/// untruncated Gaussian. The offsets do not depend on spec.mean, which lets
/// callers replay the same draws around a different mean.
Matrix sample_truncated_offsets(const UncertainSpec& spec, std::size_t n, RngStream stream);

/// Draws n samples from the truncated Gaussian around spec.mean.
std::vector<UncertainSample> sample_truncated(const UncertainSpec& spec, std::size_t n,
                                              RngStream stream);

/// Standard normal density and distribution function.
double standard_normal_pdf(double z);
double standard_normal_cdf(double z);

}  // namespace yieldopt
