#include "yieldopt/gpr.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "yieldopt/errors.hpp"

namespace yieldopt {

namespace {

constexpr double kMaxJitter = 1e-4;

}  // namespace

GprSurrogate::GprSurrogate(Matrix inputs, Vector targets, GprHyperparameters hyper)
    : inputs_(std::move(inputs)), targets_(std::move(targets)), hyper_(std::move(hyper)) {
  const auto m = inputs_.rows();
  if (m < 2) {
    throw ConfigurationError("GPR needs at least two training points");
  }
  if (targets_.size() != m) {
    throw ConfigurationError("GPR targets and inputs disagree in length");
  }
  if (hyper_.length_scales.size() != inputs_.cols()) {
    throw ConfigurationError("GPR needs one length scale per input dimension");
  }
  if (!(hyper_.signal_variance > 0.0) || !(hyper_.length_scales.array() > 0.0).all() ||
      !(hyper_.jitter > 0.0)) {
    throw ConfigurationError("GPR hyperparameters must be positive");
  }
  inv_length_ = hyper_.length_scales.cwiseInverse();

  Matrix kernel_matrix(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    kernel_matrix(i, i) = hyper_.signal_variance;
    for (Eigen::Index j = 0; j < i; ++j) {
      const double k = kernel(inputs_.row(i).transpose(), inputs_.row(j).transpose());
      kernel_matrix(i, j) = k;
      kernel_matrix(j, i) = k;
    }
  }

  for (double jitter = hyper_.jitter; jitter <= kMaxJitter * (1.0 + 1e-12); jitter *= 10.0) {
    Matrix jittered = kernel_matrix;
    jittered.diagonal().array() += jitter * hyper_.signal_variance;
    llt_.compute(jittered);
    if (llt_.info() == Eigen::Success) {
      jitter_ = jitter;
      alpha_ = llt_.solve((targets_.array() - hyper_.prior_mean).matrix());
      return;
    }
  }
  throw SurrogateFitError("kernel matrix is not positive definite even with jitter 1e-4");
}

double GprSurrogate::kernel(const VectorRef& a, const VectorRef& b) const {
  const double r2 = (a - b).cwiseProduct(inv_length_).squaredNorm();
  return hyper_.signal_variance * std::exp(-0.5 * r2);
}

GprPrediction GprSurrogate::predict(const VectorRef& query) const {
  const auto m = inputs_.rows();
  Vector k_star(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    k_star[i] = kernel(inputs_.row(i).transpose(), query);
  }
  GprPrediction out;
  out.mean = hyper_.prior_mean + k_star.dot(alpha_);
  const Vector v = llt_.matrixL().solve(k_star);
  out.stddev = std::sqrt(std::max(0.0, hyper_.signal_variance - v.squaredNorm()));
  return out;
}

GprSurrogate fit_gpr(Matrix inputs, Vector targets, GprHyperparameters hyper) {
  return GprSurrogate(std::move(inputs), std::move(targets), std::move(hyper));
}

GprHyperparameters median_heuristic(const Matrix& inputs, const Vector& targets,
                                    const Vector& length_floor) {
  const auto m = inputs.rows();
  const auto dim = inputs.cols();
  if (length_floor.size() != dim) {
    throw ConfigurationError("length floor needs one entry per input dimension");
  }
  GprHyperparameters hyper;
  hyper.length_scales.resize(dim);
  std::vector<double> distances;
  distances.reserve(static_cast<std::size_t>(m * (m - 1) / 2));
  for (Eigen::Index j = 0; j < dim; ++j) {
    distances.clear();
    for (Eigen::Index a = 0; a < m; ++a) {
      for (Eigen::Index b = 0; b < a; ++b) {
        distances.push_back(std::abs(inputs(a, j) - inputs(b, j)));
      }
    }
    double median = 0.0;
    if (!distances.empty()) {
      const auto mid = distances.begin() + static_cast<std::ptrdiff_t>(distances.size() / 2);
      std::nth_element(distances.begin(), mid, distances.end());
      median = *mid;
    }
    hyper.length_scales[j] = std::max(median, length_floor[j]);
  }
  hyper.prior_mean = targets.size() > 0 ? targets.mean() : 0.0;
  const double variance =
      targets.size() > 0 ? (targets.array() - hyper.prior_mean).square().mean() : 0.0;
  // Constant targets still need a nonzero prior scale to factorize.
  hyper.signal_variance = std::max(variance, 1e-12 * std::max(1.0, hyper.prior_mean * hyper.prior_mean));
  return hyper;
}

}  // namespace yieldopt
