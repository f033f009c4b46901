#include "yieldopt/deriv.hpp"

#include <cmath>
#include <string>

#include "yieldopt/errors.hpp"

namespace yieldopt {

Vector GradientBundle::concatenated() const {
  Vector g(d_mean.size() + d_det.size());
  g << d_mean, d_det;
  return g;
}

bool is_degenerate(const YieldEstimate& est) {
  return !est.accepted.defined || est.accepted.count == est.n_samples;
}

Vector grad_yield_mean(const YieldEstimate& est, const UncertainSpec& uspec) {
  if (is_degenerate(est)) {
    return Vector::Zero(uspec.dimension());
  }
  return est.value * (uspec.precision() * (est.accepted.mean - uspec.mean()));
}

Matrix hess_yield_mean(const YieldEstimate& est, const UncertainSpec& uspec) {
  const auto n = uspec.dimension();
  if (is_degenerate(est)) {
    return Matrix::Zero(n, n);
  }
  const Vector shift = est.accepted.mean - uspec.mean();
  const Matrix inner = est.accepted.covariance + shift * shift.transpose() - uspec.covariance();
  const Matrix h = est.value * (uspec.precision() * inner * uspec.precision());
  return 0.5 * (h + h.transpose());
}

Vector default_fd_steps(const Vector& d) {
  return d.cwiseAbs().unaryExpr([](double v) { return std::max(1e-3 * v, 1e-3); });
}

FdGradient fd_grad_det(IndicatorClassifier& classifier, const PerformanceSpec& spec,
                       const SampleSet& samples, const Vector& d, const Vector& steps) {
  if (steps.size() != d.size()) {
    throw ConfigurationError("need one finite-difference step per deterministic variable");
  }
  if (!(steps.array() > 0.0).all()) {
    throw ConfigurationError("finite-difference steps must be positive");
  }
  FdGradient out;
  out.gradient = Vector::Zero(d.size());
  const double n = static_cast<double>(samples.size());
  auto yield_at = [&](const Vector& shifted) {
    const Classification c = classifier.classify(spec, samples, shifted);
    out.yield_evals += 1;
    out.qoi_evals += c.qoi_evals;
    out.full_model_evals += c.full_model_evals;
    std::size_t count = 0;
    for (auto v : c.inside) {
      count += v;
    }
    return static_cast<double>(count) / n;
  };
  for (Eigen::Index j = 0; j < d.size(); ++j) {
    Vector plus = d;
    Vector minus = d;
    plus[j] += steps[j];
    minus[j] -= steps[j];
    const double y_plus = yield_at(plus);
    const double y_minus = yield_at(minus);
    out.gradient[j] = (y_plus - y_minus) / (2.0 * steps[j]);
  }
  return out;
}

FdGradient fd_grad_det(const QoiModel& model, const PerformanceSpec& spec,
                       const SampleSet& samples, const Vector& d, const Vector& steps) {
  MonteCarloClassifier classifier(model);
  return fd_grad_det(classifier, spec, samples, d, steps);
}

BfgsState BfgsState::identity(Eigen::Index dimension) {
  BfgsState s;
  s.hessian_approx = Matrix::Identity(dimension, dimension);
  return s;
}

BfgsUpdateResult bfgs_update(const BfgsState& state, const Vector& new_point,
                             const Vector& new_gradient) {
  const auto n = state.hessian_approx.rows();
  if (new_point.size() != n || new_gradient.size() != n) {
    throw ConfigurationError("BFGS dimension mismatch: expected " + std::to_string(n));
  }
  BfgsUpdateResult out{state, false};
  out.state.prev_point = new_point;
  out.state.prev_gradient = new_gradient;
  out.state.has_previous = true;
  if (!state.has_previous) {
    return out;
  }
  const Vector x = new_point - state.prev_point;
  const Vector g = new_gradient - state.prev_gradient;
  const double curvature = g.dot(x);
  if (curvature <= 1e-10 * g.norm() * x.norm()) {
    return out;
  }
  const Vector hx = state.hessian_approx * x;
  const double xhx = x.dot(hx);
  if (!(xhx > 0.0)) {
    return out;
  }
  Matrix h = state.hessian_approx + g * g.transpose() / curvature - hx * hx.transpose() / xhx;
  out.state.hessian_approx = 0.5 * (h + h.transpose());
  out.applied = true;
  return out;
}

MixedHessian assemble_mixed_hessian(const BfgsState& bfgs, const Matrix& analytic_pp) {
  const auto n = bfgs.hessian_approx.rows();
  const auto np = analytic_pp.rows();
  if (analytic_pp.cols() != np || np > n) {
    throw ConfigurationError("analytic block does not fit into the BFGS matrix");
  }
  Matrix h = bfgs.hessian_approx;
  h.topLeftCorner(np, np) = analytic_pp;
  h = 0.5 * (h + h.transpose()).eval();
  if (!h.allFinite()) {
    throw ConfigurationError("mixed Hessian has non-finite entries");
  }

  MixedHessian out;
  double tau = 0.0;
  for (;;) {
    Matrix shifted = h;
    shifted.diagonal().array() += tau;
    Eigen::LLT<Matrix> llt(shifted);
    if (llt.info() == Eigen::Success) {
      out.matrix = std::move(shifted);
      out.regularization = tau;
      return out;
    }
    tau = tau == 0.0 ? 1e-8 : tau * 100.0;
  }
}

}  // namespace yieldopt
