#include "yieldopt/qoi.hpp"

#include <cmath>
#include <string>

#include "yieldopt/errors.hpp"

namespace yieldopt {

RangeGrid::RangeGrid(std::vector<double> points) : points_(std::move(points)) {
  if (points_.empty()) {
    throw ConfigurationError("range grid needs at least one point");
  }
  for (std::size_t i = 1; i < points_.size(); ++i) {
    if (!(points_[i] > points_[i - 1])) {
      throw ConfigurationError("range grid must be strictly increasing");
    }
  }
}

RangeGrid RangeGrid::equidistant(double first, double last, std::size_t count) {
  if (count == 0) {
    throw ConfigurationError("range grid needs at least one point");
  }
  std::vector<double> points(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double t = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
    points[i] = first + t * (last - first);
  }
  if (count > 1) {
    points.back() = last;
  }
  return RangeGrid(std::move(points));
}

Vector DesignPoint::concatenated() const {
  Vector x(uncertain_mean.size() + deterministic.size());
  x << uncertain_mean, deterministic;
  return x;
}

DesignPoint DesignPoint::split(const Vector& x, Eigen::Index n_uncertain) {
  return {x.head(n_uncertain), x.tail(x.size() - n_uncertain)};
}

SafeDomainResult is_in_safe_domain(const QoiModel& model, const PerformanceSpec& spec,
                                   const VectorRef& p, const VectorRef& d) {
  SafeDomainResult result;
  const auto& points = spec.grid.points();
  result.margins.resize(static_cast<Eigen::Index>(points.size()));
  result.inside = true;
  for (std::size_t k = 0; k < points.size(); ++k) {
    const double margin = model.evaluate(p, d, points[k]) - spec.threshold;
    result.margins[static_cast<Eigen::Index>(k)] = margin;
    if (!(margin <= 0.0)) {
      result.inside = false;
    }
  }
  return result;
}

HalfspaceOracle::HalfspaceOracle(Vector normal, double offset, Vector deterministic_weights)
    : normal_(std::move(normal)), offset_(offset), weights_(std::move(deterministic_weights)) {
  if (normal_.size() == 0 || std::abs(normal_.norm() - 1.0) > 1e-12) {
    throw ConfigurationError("half-space normal must be a unit vector");
  }
}

PerformanceSpec HalfspaceOracle::performance_spec() const {
  return PerformanceSpec{offset_, RangeGrid({0.0})};
}

double HalfspaceOracle::do_evaluate(const VectorRef& p, const VectorRef& d, double) const {
  double value = normal_.dot(p);
  if (weights_.size() > 0) {
    value -= weights_.dot(d);
  }
  return value;
}

double HalfspaceOracle::standardized_margin(const UncertainSpec& spec, const VectorRef& d) const {
  const double scale = std::sqrt(normal_.dot(spec.covariance() * normal_));
  double shift = offset_;
  if (weights_.size() > 0) {
    shift += weights_.dot(d);
  }
  return (shift - normal_.dot(spec.mean())) / scale;
}

double HalfspaceOracle::yield(const UncertainSpec& spec, const VectorRef& d) const {
  return standard_normal_cdf(standardized_margin(spec, d));
}

Vector HalfspaceOracle::yield_gradient_mean(const UncertainSpec& spec, const VectorRef& d) const {
  const double scale = std::sqrt(normal_.dot(spec.covariance() * normal_));
  return -standard_normal_pdf(standardized_margin(spec, d)) / scale * normal_;
}

Matrix HalfspaceOracle::yield_hessian_mean(const UncertainSpec& spec, const VectorRef& d) const {
  const double scale = std::sqrt(normal_.dot(spec.covariance() * normal_));
  const double z = standardized_margin(spec, d);
  return -z * standard_normal_pdf(z) / (scale * scale) * (normal_ * normal_.transpose());
}

Vector HalfspaceOracle::yield_gradient_deterministic(const UncertainSpec& spec,
                                                     const VectorRef& d) const {
  const double scale = std::sqrt(normal_.dot(spec.covariance() * normal_));
  return standard_normal_pdf(standardized_margin(spec, d)) / scale * weights_;
}

}  // namespace yieldopt
