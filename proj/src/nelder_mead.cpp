#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "yieldopt/errors.hpp"
#include "yieldopt/optimize.hpp"

namespace yieldopt {

namespace {

constexpr double kReflection = 1.0;
constexpr double kExpansion = 2.0;
constexpr double kContraction = 0.5;
constexpr double kShrink = 0.5;

struct BudgetExhausted {};

}  // namespace

NelderMeadResult nelder_mead_minimize(const std::function<double(const Vector&)>& objective,
                                      const Vector& start, std::size_t max_evaluations,
                                      double diameter_tolerance) {
  const auto n = start.size();
  NelderMeadResult result;
  auto f = [&](const Vector& x) {
    if (result.evaluations >= max_evaluations) {
      throw BudgetExhausted{};
    }
    ++result.evaluations;
    return objective(x);
  };

  std::vector<Vector> simplex;
  std::vector<double> values;
  simplex.push_back(start);
  for (Eigen::Index i = 0; i < n; ++i) {
    Vector v = start;
    v[i] += std::max(0.05 * std::abs(start[i]), 0.1);
    simplex.push_back(v);
  }

  try {
    for (const Vector& v : simplex) {
      values.push_back(f(v));
    }
    std::vector<std::size_t> order(simplex.size());
    for (;;) {
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
      {
        std::vector<Vector> s2;
        std::vector<double> v2;
        for (std::size_t i : order) {
          s2.push_back(simplex[i]);
          v2.push_back(values[i]);
        }
        simplex.swap(s2);
        values.swap(v2);
      }
      double diameter = 0.0;
      for (std::size_t i = 1; i < simplex.size(); ++i) {
        diameter = std::max(diameter, (simplex[i] - simplex[0]).norm());
      }
      if (diameter < diameter_tolerance || values.back() == values.front()) {
        result.converged = true;
        break;
      }

      const std::size_t worst = simplex.size() - 1;
      Vector centroid = Vector::Zero(n);
      for (std::size_t i = 0; i < worst; ++i) {
        centroid += simplex[i];
      }
      centroid /= static_cast<double>(worst);

      const Vector reflected = centroid + kReflection * (centroid - simplex[worst]);
      const double f_reflected = f(reflected);
      if (f_reflected < values[0]) {
        const Vector expanded = centroid + kExpansion * (reflected - centroid);
        const double f_expanded = f(expanded);
        if (f_expanded < f_reflected) {
          simplex[worst] = expanded;
          values[worst] = f_expanded;
        } else {
          simplex[worst] = reflected;
          values[worst] = f_reflected;
        }
        continue;
      }
      if (f_reflected < values[worst - 1]) {
        simplex[worst] = reflected;
        values[worst] = f_reflected;
        continue;
      }
      const bool outside = f_reflected < values[worst];
      const Vector contracted = outside ? Vector(centroid + kContraction * (reflected - centroid))
                                        : Vector(centroid + kContraction * (simplex[worst] - centroid));
      const double f_contracted = f(contracted);
      if (f_contracted < (outside ? f_reflected : values[worst])) {
        simplex[worst] = contracted;
        values[worst] = f_contracted;
        continue;
      }
      for (std::size_t i = 1; i < simplex.size(); ++i) {
        simplex[i] = simplex[0] + kShrink * (simplex[i] - simplex[0]);
        values[i] = f(simplex[i]);
      }
    }
  } catch (const BudgetExhausted&) {
  }

  const auto best = static_cast<std::size_t>(
      std::min_element(values.begin(), values.end()) - values.begin());
  result.best = simplex[best];
  result.best_value = values[best];
  return result;
}

RunRecord nelder_mead_reference(const YieldProblem& problem, const OptimizerConfig& config,
                                std::uint32_t strategy_index) {
  config.validate();
  const auto np = problem.uncertain.dimension();
  MonteCarloClassifier classifier(*problem.model);

  RunRecord record;
  record.strategy = strategy_name(Strategy::v1_dfo_ref);

  // One set of draws, replayed around every vertex.
  const SampleSet samples =
      draw_samples(problem.uncertain, config.n_max, strategy_stream(config.seed, strategy_index, 1));
  std::uint64_t yield_evals = 0, qoi_evals = 0, full_evals = 0;

  auto objective = [&](const Vector& x) {
    const DesignPoint point = DesignPoint::split(x, np);
    IterationRecord entry;
    entry.iteration = record.entries.size() + 1;
    entry.kind = EntryKind::evaluation;
    entry.point = point;
    entry.n_samples = config.n_max;
    entry.grad_norm = std::numeric_limits<double>::quiet_NaN();
    double value = std::numeric_limits<double>::infinity();
    if (!problem.admissible(point)) {
      // Never classified, so it does not count as a yield evaluation.
      entry.cum_yield_evals = yield_evals;
      entry.cum_qoi_evals = qoi_evals;
      entry.cum_full_model_evals = full_evals;
      record.entries.push_back(entry);
      return value;
    }
    ++yield_evals;
    try {
      const Classification c =
          classifier.classify(problem.spec, samples.recentered(point.uncertain_mean), point.deterministic);
      qoi_evals += c.qoi_evals;
      full_evals += c.full_model_evals;
      const YieldEstimate est = summarize(c, samples.recentered(point.uncertain_mean));
      entry.yield = est.value;
      entry.sigma = est.sigma;
      value = -est.value;
    } catch (const DomainError&) {
      // Unphysical vertex: worst possible objective.
    }
    entry.cum_yield_evals = yield_evals;
    entry.cum_qoi_evals = qoi_evals;
    entry.cum_full_model_evals = full_evals;
    record.entries.push_back(entry);
    return value;
  };

  const NelderMeadResult nm = nelder_mead_minimize(objective, problem.initial_point().concatenated(),
                                                   config.nm_max_evaluations, config.nm_diameter_tolerance);
  record.status = nm.converged ? RunStatus::converged : RunStatus::max_iterations;
  record.optimum = DesignPoint::split(nm.best, np);

  const UncertainSpec final_spec = problem.uncertain.with_mean(record.optimum.uncertain_mean);
  const SampleSet final_samples =
      draw_samples(final_spec, config.n_max, strategy_stream(config.seed, strategy_index, 0xffffffffu));
  const Classification final_cls = classifier.classify(problem.spec, final_samples, record.optimum.deterministic);
  ++yield_evals;
  qoi_evals += final_cls.qoi_evals;
  full_evals += final_cls.full_model_evals;
  record.final_estimate = summarize(final_cls, final_samples);

  IterationRecord last;
  last.iteration = record.entries.size() + 1;
  last.kind = EntryKind::final_estimate;
  last.point = record.optimum;
  last.yield = record.final_estimate.value;
  last.sigma = record.final_estimate.sigma;
  last.n_samples = config.n_max;
  last.grad_norm = std::numeric_limits<double>::quiet_NaN();
  last.cum_yield_evals = yield_evals;
  last.cum_qoi_evals = qoi_evals;
  last.cum_full_model_evals = full_evals;
  record.entries.push_back(last);
  return record;
}

}  // namespace yieldopt
