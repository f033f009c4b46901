#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "yieldopt/uq.hpp"

namespace yieldopt {

/// Discretized range parameter (e.g. angular frequencies), strictly increasing.
class RangeGrid {
 public:
  explicit RangeGrid(std::vector<double> points);
  /// count equidistant points over [first, last]; count == 1 gives {first}.
  static RangeGrid equidistant(double first, double last, std::size_t count);

  const std::vector<double>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }

 private:
  std::vector<double> points_;
};

/// Requirement Q_r(p, d) <= threshold at every grid point r.
struct PerformanceSpec {
  double threshold = 0.0;
  RangeGrid grid;
};

struct DesignPoint {
  Vector uncertain_mean;
  Vector deterministic;

  /// (uncertain_mean, deterministic) stacked.
  Vector concatenated() const;
  static DesignPoint split(const Vector& x, Eigen::Index n_uncertain);
};

/// Quantity of interest Q_r(p, d). Evaluation is pure apart from a
/// thread-safe call counter.
class QoiModel {
 public:
  virtual ~QoiModel() = default;

  double evaluate(const VectorRef& p, const VectorRef& d, double r) const {
    calls_.fetch_add(1, std::memory_order_relaxed);
    return do_evaluate(p, d, r);
  }

  std::uint64_t evaluation_count() const { return calls_.load(std::memory_order_relaxed); }

  /// Whether every p in the box [p_lower, p_upper] can be evaluated at d on
  /// the whole grid. Optimizers use it to keep the truncation box physical.
  virtual bool admissible(const VectorRef& p_lower, const VectorRef& p_upper, const VectorRef& d,
                          const RangeGrid& grid) const {
    (void)p_lower, (void)p_upper, (void)d, (void)grid;
    return true;
  }

 protected:
  virtual double do_evaluate(const VectorRef& p, const VectorRef& d, double r) const = 0;

 private:
  mutable std::atomic<std::uint64_t> calls_{0};
};

struct SafeDomainResult {
  bool inside = false;
  /// Q_r - threshold per grid point.
  Vector margins;
};

/// Indicator of the safe domain at fixed d, evaluating every grid point.
SafeDomainResult is_in_safe_domain(const QoiModel& model, const PerformanceSpec& spec,
                                   const VectorRef& p, const VectorRef& d);

/// Q(p, d, r) = value.
class ConstantModel final : public QoiModel {
 public:
  explicit ConstantModel(double value) : value_(value) {}

 protected:
  double do_evaluate(const VectorRef&, const VectorRef&, double) const override { return value_; }

 private:
  double value_;
};

/// Wraps an arbitrary callable; used by tests and small experiments.
class FunctionModel final : public QoiModel {
 public:
  using Function = std::function<double(const VectorRef&, const VectorRef&, double)>;
  explicit FunctionModel(Function f) : f_(std::move(f)) {}

 protected:
  double do_evaluate(const VectorRef& p, const VectorRef& d, double r) const override {
    return f_(p, d, r);
  }

 private:
  Function f_;
};

struct WaveguideConfig {
  double width_mm = 30.0;
  double chi_e = 0.07;
  double chi_m = 0.04;
  double db_floor = -100.0;
};

/// |S11| in dB of a rectangular waveguide (TE10 mode) holding a dielectric
/// inlay of length p[0] mm between two vacuum offsets of length p[1] mm.
///
/// The inlay material is eps_r = 1 + d[0] * chi_e, mu_r = 1 + d[1] * chi_m.
/// Sections are cascaded as ABCD transmission-line matrices and referenced
/// to the empty guide's TE10 wave impedance on both ports. The range
/// parameter is the angular frequency in rad/s.
class WaveguideModel final : public QoiModel {
 public:
  explicit WaveguideModel(WaveguideConfig config);
  const WaveguideConfig& config() const { return config_; }

  /// Lengths nonnegative and TE10 propagating in both media at every grid point.
  bool admissible(const VectorRef& p_lower, const VectorRef& p_upper, const VectorRef& d,
                  const RangeGrid& grid) const override;

 protected:
  double do_evaluate(const VectorRef& p, const VectorRef& d, double omega) const override;

 private:
  WaveguideConfig config_;
};

/// Linear oracle Q(p, d) = normal^T p - weights^T d at a single grid point,
/// paired with the closed-form yield of the untruncated Gaussian:
///   Y = Phi(z),  z = (offset + weights^T d - normal^T mean) / s,
///   s = sqrt(normal^T Sigma normal).
///
/// With empty weights it is the plain half-space oracle.
class HalfspaceOracle final : public QoiModel {
 public:
  HalfspaceOracle(Vector normal, double offset, Vector deterministic_weights = Vector());

  const Vector& normal() const { return normal_; }
  double offset() const { return offset_; }
  const Vector& deterministic_weights() const { return weights_; }

  /// Single-point performance spec with threshold = offset.
  PerformanceSpec performance_spec() const;

  double standardized_margin(const UncertainSpec& spec, const VectorRef& d) const;
  double yield(const UncertainSpec& spec, const VectorRef& d = Vector()) const;
  Vector yield_gradient_mean(const UncertainSpec& spec, const VectorRef& d = Vector()) const;
  Matrix yield_hessian_mean(const UncertainSpec& spec, const VectorRef& d = Vector()) const;
  Vector yield_gradient_deterministic(const UncertainSpec& spec, const VectorRef& d) const;

 protected:
  double do_evaluate(const VectorRef& p, const VectorRef& d, double r) const override;

 private:
  Vector normal_;
  double offset_;
  Vector weights_;
};

}  // namespace yieldopt
