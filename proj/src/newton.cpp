#include <cmath>
#include <limits>
#include <string>

#include "yieldopt/errors.hpp"
#include "yieldopt/optimize.hpp"

namespace yieldopt {

namespace {

struct Counters {
  std::uint64_t yield_evals = 0;
  std::uint64_t qoi_evals = 0;
  std::uint64_t full_model_evals = 0;

  void add(const Classification& c) {
    yield_evals += 1;
    qoi_evals += c.qoi_evals;
    full_model_evals += c.full_model_evals;
  }
  void add(const FdGradient& fd) {
    yield_evals += fd.yield_evals;
    qoi_evals += fd.qoi_evals;
    full_model_evals += fd.full_model_evals;
  }
};

double fraction_inside(const Classification& c) {
  std::size_t count = 0;
  for (auto v : c.inside) {
    count += v;
  }
  return static_cast<double>(count) / static_cast<double>(c.inside.size());
}

}  // namespace

void OptimizerConfig::validate() const {
  auto fail = [](const std::string& field, const std::string& why) {
    throw ConfigurationError("optimizer." + field + ": " + why);
  };
  if (!(sigma_max > 0.0)) fail("sigma_max", "must be positive");
  if (n_initial == 0) fail("n_initial", "must be positive");
  if (n_max == 0) fail("n_max", "must be positive");
  if (n_initial > n_max) fail("n_initial", "must not exceed n_max");
  if (max_iterations == 0) fail("max_iterations", "must be positive");
  if (!(gradient_tolerance > 0.0)) fail("gradient_tolerance", "must be positive");
  if (!(step_tolerance > 0.0)) fail("step_tolerance", "must be positive");
  if (!(armijo_c1 > 0.0 && armijo_c1 < 1.0)) fail("armijo_c1", "must lie in (0, 1)");
  if (!(backtrack_factor > 0.0 && backtrack_factor < 1.0)) fail("backtrack_factor", "must lie in (0, 1)");
  if (!(angle_threshold > 0.0 && angle_threshold < 1.0)) fail("angle_threshold", "must lie in (0, 1)");
  if (!(max_step_norm > 0.0)) fail("max_step_norm", "must be positive");
  if (fd_steps.size() > 0 && !(fd_steps.array() > 0.0).all()) fail("fd_steps", "must be positive");
  if (!(hybrid.gamma >= 0.0)) fail("hybrid_gamma", "must be nonnegative");
  if (hybrid.initial_design_size < 2) fail("hybrid_initial_design", "must be at least 2");
  if (hybrid.initial_design_size > n_initial) fail("hybrid_initial_design", "must not exceed n_initial");
  if (hybrid.max_training < hybrid.initial_design_size) fail("hybrid_max_training", "must be at least hybrid_initial_design");
  if (nm_max_evaluations == 0) fail("nm_max_evaluations", "must be positive");
  if (!(nm_diameter_tolerance > 0.0)) fail("nm_diameter_tolerance", "must be positive");
}

std::string to_string(RunStatus status) {
  switch (status) {
    case RunStatus::converged: return "converged";
    case RunStatus::max_iterations: return "max-iter";
    case RunStatus::degenerate: return "degenerate";
    case RunStatus::failed: return "failed";
  }
  return "unknown";
}

std::uint64_t RunRecord::total_yield_evals() const {
  return entries.empty() ? 0 : entries.back().cum_yield_evals;
}
std::uint64_t RunRecord::total_qoi_evals() const {
  return entries.empty() ? 0 : entries.back().cum_qoi_evals;
}
std::uint64_t RunRecord::total_full_model_evals() const {
  return entries.empty() ? 0 : entries.back().cum_full_model_evals;
}

bool YieldProblem::admissible(const DesignPoint& point) const {
  const Vector& half = uncertain.truncation_halfwidth();
  return model->admissible(point.uncertain_mean - half, point.uncertain_mean + half,
                           point.deterministic, spec.grid);
}

std::size_t non_adaptive_sample_size(const OptimizerConfig& config) {
  return worst_case_sample_size(config.sigma_max);
}

RngStream strategy_stream(std::uint64_t seed, std::uint32_t strategy, std::uint32_t index) {
  return {seed, (static_cast<std::uint64_t>(strategy) << 32) | index};
}

RunRecord newton_mixed(const YieldProblem& problem, const OptimizerConfig& config,
                       const NewtonOptions& options) {
  config.validate();
  const auto np = problem.uncertain.dimension();
  const auto nd = problem.initial_deterministic.size();
  if (config.fd_steps.size() > 0 && config.fd_steps.size() != nd) {
    throw ConfigurationError("optimizer.fd_steps: need one step per deterministic variable");
  }

  std::unique_ptr<IndicatorClassifier> classifier;
  if (options.hybrid) {
    HybridSettings settings = config.hybrid;
    settings.persistent = true;
    classifier = std::make_unique<HybridClassifier>(*problem.model, settings);
  } else {
    classifier = std::make_unique<MonteCarloClassifier>(*problem.model);
  }

  RunRecord record;
  record.strategy = options.name;
  record.status = RunStatus::max_iterations;

  std::size_t n = options.adaptive ? config.n_initial : non_adaptive_sample_size(config);
  Vector x = problem.initial_point().concatenated();
  BfgsState bfgs = BfgsState::identity(np + nd);
  Counters counters;

  auto push_entry = [&](IterationRecord entry) {
    entry.cum_yield_evals = counters.yield_evals;
    entry.cum_qoi_evals = counters.qoi_evals;
    entry.cum_full_model_evals = counters.full_model_evals;
    record.entries.push_back(std::move(entry));
  };

  for (std::size_t it = 1; it <= config.max_iterations; ++it) {
    const DesignPoint point = DesignPoint::split(x, np);
    const UncertainSpec uspec = problem.uncertain.with_mean(point.uncertain_mean);
    const SampleSet samples =
        draw_samples(uspec, n, strategy_stream(config.seed, options.strategy_index, static_cast<std::uint32_t>(it)));
    const Classification cls = classifier->classify(problem.spec, samples, point.deterministic);
    counters.add(cls);
    const YieldEstimate est = summarize(cls, samples);

    GradientBundle grad;
    grad.d_mean = grad_yield_mean(est, uspec);
    grad.degenerate = is_degenerate(est);
    grad.d_det = Vector::Zero(nd);
    if (nd > 0) {
      const Vector steps = config.fd_steps.size() > 0 ? config.fd_steps : default_fd_steps(point.deterministic);
      const FdGradient fd = fd_grad_det(*classifier, problem.spec, samples, point.deterministic, steps);
      counters.add(fd);
      grad.d_det = fd.gradient;
    }
    const Vector g = grad.concatenated();
    bfgs = bfgs_update(bfgs, x, -g).state;

    IterationRecord entry;
    entry.iteration = it;
    entry.point = point;
    entry.yield = est.value;
    entry.sigma = est.sigma;
    entry.n_samples = n;
    entry.grad_norm = g.norm();

    if (g.norm() <= config.gradient_tolerance) {
      push_entry(entry);
      // No derivative information at all: Y ~ 0 leaves nowhere to go.
      record.status = est.accepted.count < 2 ? RunStatus::degenerate : RunStatus::converged;
      break;
    }

    const MixedHessian mixed = assemble_mixed_hessian(bfgs, -hess_yield_mean(est, uspec));
    entry.regularization = mixed.regularization;
    Vector direction = mixed.matrix.llt().solve(g);
    const bool angle_ok = g.dot(direction) >= config.angle_threshold * g.norm() * direction.norm();
    if (grad.degenerate || !angle_ok || !direction.allFinite()) {
      direction = g;
      entry.steepest_fallback = true;
    }

    const double slope = g.dot(direction);
    double alpha = std::min(1.0, config.max_step_norm / direction.norm());
    bool accepted = false;
    double trial_yield = est.value;
    for (std::size_t b = 0; b <= config.max_backtracks; ++b, alpha *= config.backtrack_factor) {
      const Vector trial = x + alpha * direction;
      const DesignPoint tp = DesignPoint::split(trial, np);
      if (!problem.admissible(tp)) {
        continue;
      }
      try {
        const Classification tc =
            classifier->classify(problem.spec, samples.recentered(tp.uncertain_mean), tp.deterministic);
        counters.add(tc);
        trial_yield = fraction_inside(tc);
      } catch (const DomainError&) {
        counters.yield_evals += 1;
        continue;
      }
      if (trial_yield >= est.value + config.armijo_c1 * alpha * slope) {
        accepted = true;
        break;
      }
    }

    if (!accepted) {
      entry.step_norm = 0.0;
      push_entry(entry);
      if (options.adaptive && n < config.n_max) {
        n = std::min(2 * n, config.n_max);
        continue;
      }
      record.status = RunStatus::degenerate;
      record.message = "line search failed at the largest sample size";
      break;
    }

    const Vector step = alpha * direction;
    x += step;
    entry.step_norm = step.norm();
    push_entry(entry);
    if (step.norm() < config.step_tolerance) {
      record.status = RunStatus::converged;
      break;
    }
    if (options.adaptive && est.sigma > config.sigma_max &&
        std::abs(trial_yield - est.value) < 2.0 * est.sigma) {
      n = std::min(2 * n, config.n_max);
    }
  }

  record.optimum = DesignPoint::split(x, np);
  const UncertainSpec final_spec = problem.uncertain.with_mean(record.optimum.uncertain_mean);
  const SampleSet final_samples = draw_samples(
      final_spec, config.n_max, strategy_stream(config.seed, options.strategy_index, 0xffffffffu));
  const Classification final_cls =
      classifier->classify(problem.spec, final_samples, record.optimum.deterministic);
  counters.add(final_cls);
  record.final_estimate = summarize(final_cls, final_samples);

  IterationRecord last;
  last.iteration = record.entries.size() + 1;
  last.kind = EntryKind::final_estimate;
  last.point = record.optimum;
  last.yield = record.final_estimate.value;
  last.sigma = record.final_estimate.sigma;
  last.n_samples = config.n_max;
  last.grad_norm = std::numeric_limits<double>::quiet_NaN();
  push_entry(last);
  return record;
}

}  // namespace yieldopt
