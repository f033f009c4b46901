#include <algorithm>
#include <cmath>
#include <limits>

#include "yieldopt/errors.hpp"
#include "yieldopt/estimate.hpp"

namespace yieldopt {

namespace {

Vector features(const Vector& p, const Vector& d) {
  Vector x(p.size() + d.size());
  x << p, d;
  return x;
}

// Greedy maximin subset of the sample offsets: start at the sample closest to
// the mean, then repeatedly add the sample farthest from everything chosen.
std::vector<std::size_t> space_filling_subset(const Matrix& offsets, std::size_t count) {
  const auto n = static_cast<std::size_t>(offsets.cols());
  count = std::min(count, n);
  std::vector<std::size_t> chosen;
  if (count == 0) {
    return chosen;
  }
  std::size_t first = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (offsets.col(static_cast<Eigen::Index>(i)).squaredNorm() <
        offsets.col(static_cast<Eigen::Index>(first)).squaredNorm()) {
      first = i;
    }
  }
  chosen.push_back(first);
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  while (chosen.size() < count) {
    const auto last = static_cast<Eigen::Index>(chosen.back());
    std::size_t best = n;
    double best_distance = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double dist =
          (offsets.col(static_cast<Eigen::Index>(i)) - offsets.col(last)).squaredNorm();
      nearest[i] = std::min(nearest[i], dist);
      if (nearest[i] > best_distance) {
        best_distance = nearest[i];
        best = i;
      }
    }
    if (best_distance <= 0.0) {
      break;  // only duplicates left
    }
    chosen.push_back(best);
  }
  return chosen;
}

}  // namespace

HybridClassifier::HybridClassifier(const QoiModel& model, HybridSettings settings)
    : model_(model), settings_(settings) {
  if (!(settings_.gamma >= 0.0)) {
    throw ConfigurationError("hybrid gamma must be nonnegative");
  }
  if (settings_.initial_design_size < 2) {
    throw ConfigurationError("hybrid initial design needs at least two samples");
  }
  if (settings_.max_training < settings_.initial_design_size) {
    throw ConfigurationError("hybrid max_training must be at least the initial design size");
  }
}

void HybridClassifier::append_training(const Matrix& inputs, const Matrix& targets) {
  Matrix merged_inputs(inputs_.rows() + inputs.rows(), inputs.cols());
  Matrix merged_targets(targets_.rows() + targets.rows(), targets.cols());
  Eigen::Index rows = 0;
  auto push = [&](const auto& x, const auto& y) {
    for (Eigen::Index r = 0; r < rows; ++r) {
      if (merged_inputs.row(r) == x) {
        return;
      }
    }
    merged_inputs.row(rows) = x;
    merged_targets.row(rows) = y;
    ++rows;
  };
  for (Eigen::Index r = 0; r < inputs_.rows(); ++r) {
    push(inputs_.row(r), targets_.row(r));
  }
  for (Eigen::Index r = 0; r < inputs.rows(); ++r) {
    push(inputs.row(r), targets.row(r));
  }
  // Keep the most recent points; they sit closest to the current design.
  const Eigen::Index keep = std::min<Eigen::Index>(rows, static_cast<Eigen::Index>(settings_.max_training));
  inputs_ = merged_inputs.middleRows(rows - keep, keep);
  targets_ = merged_targets.middleRows(rows - keep, keep);
}

void HybridClassifier::refit(Eigen::Index n_uncertain) {
  surrogates_.clear();
  const auto dim = inputs_.cols();
  Vector floor(dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    floor[j] = j < n_uncertain ? settings_.uncertain_length_floor : settings_.deterministic_length_floor;
  }
  for (Eigen::Index k = 0; k < targets_.cols(); ++k) {
    const Vector y = targets_.col(k);
    surrogates_.push_back(fit_gpr(inputs_, y, median_heuristic(inputs_, y, floor)));
  }
}

Classification HybridClassifier::classify(const PerformanceSpec& spec, const SampleSet& samples,
                                          const Vector& d) {
  const std::size_t n = samples.size();
  const std::size_t grid = spec.grid.size();
  const auto n_uncertain = samples.mean.size();
  const auto dim = n_uncertain + d.size();

  Classification out;
  out.inside.assign(n, 0);
  out.true_evaluated.assign(n, 0);
  out.critical.assign(n, 0);
  out.qoi_evals = static_cast<std::uint64_t>(n) * grid;

  std::vector<Vector> new_inputs;
  std::vector<Vector> new_targets;
  auto evaluate_true = [&](std::size_t i) {
    const Vector p = samples.point(i);
    const SafeDomainResult r = is_in_safe_domain(model_, spec, p, d);
    out.inside[i] = r.inside ? 1 : 0;
    out.true_evaluated[i] = 1;
    out.full_model_evals += grid;
    new_inputs.push_back(features(p, d));
    new_targets.push_back(r.margins.array() + spec.threshold);
  };

  auto flush = [&] {
    if (new_inputs.empty()) {
      return;
    }
    Matrix x(static_cast<Eigen::Index>(new_inputs.size()), dim);
    Matrix y(static_cast<Eigen::Index>(new_inputs.size()), static_cast<Eigen::Index>(grid));
    for (std::size_t r = 0; r < new_inputs.size(); ++r) {
      x.row(static_cast<Eigen::Index>(r)) = new_inputs[r].transpose();
      y.row(static_cast<Eigen::Index>(r)) = new_targets[r].transpose();
    }
    new_inputs.clear();
    new_targets.clear();
    append_training(x, y);
    refit(n_uncertain);
  };

  const bool fresh = !settings_.persistent || surrogates_.size() != grid ||
                     inputs_.cols() != static_cast<Eigen::Index>(dim);
  if (fresh) {
    inputs_.resize(0, dim);
    targets_.resize(0, static_cast<Eigen::Index>(grid));
    for (std::size_t i : space_filling_subset(samples.offsets, settings_.initial_design_size)) {
      evaluate_true(i);
    }
    flush();
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (out.true_evaluated[i]) {
      continue;
    }
    const Vector x = features(samples.point(i), d);
    // Inside needs every grid point confidently below the threshold; one
    // confidently violated grid point already decides "outside".
    bool uncertain = false;
    bool violated = false;
    for (std::size_t k = 0; k < grid && !violated; ++k) {
      const GprPrediction pred = surrogates_[k].predict(x);
      const double margin = pred.mean - spec.threshold;
      const double band = settings_.gamma * pred.stddev;
      if (margin > band) {
        violated = true;
      } else if (margin >= -band) {
        uncertain = true;
      }
    }
    const bool critical = uncertain && !violated;
    const bool inside = !uncertain && !violated;
    if (critical) {
      out.critical[i] = 1;
      evaluate_true(i);
    } else {
      out.inside[i] = inside ? 1 : 0;
    }
  }

  // The surrogate is frozen during one classification; a persistent
  // classifier learns the critical samples before the next call.
  if (settings_.persistent) {
    flush();
  }
  return out;
}

EstimateResult estimate_yield_hybrid(const QoiModel& model, const PerformanceSpec& spec,
                                     const UncertainSpec& uspec, const Vector& d, std::size_t n,
                                     RngStream stream, double gamma,
                                     std::size_t initial_design_size) {
  if (initial_design_size < 2 || n < initial_design_size) {
    throw ConfigurationError("hybrid estimation needs n >= initial_design_size >= 2");
  }
  HybridSettings settings;
  settings.gamma = gamma;
  settings.initial_design_size = initial_design_size;
  settings.max_training = std::max(settings.max_training, initial_design_size);
  EstimateResult result;
  result.samples = draw_samples(uspec, n, stream);
  HybridClassifier classifier(model, settings);
  result.classification = classifier.classify(spec, result.samples, d);
  result.estimate = summarize(result.classification, result.samples);
  return result;
}

}  // namespace yieldopt
