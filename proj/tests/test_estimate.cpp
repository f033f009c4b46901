#include <doctest.h>

#include <cmath>
#include <numbers>

#include "yieldopt/errors.hpp"
#include "yieldopt/estimate.hpp"

using namespace yieldopt;

namespace {

Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) {
    v[i++] = x;
  }
  return v;
}

UncertainSpec benchmark_spec() {
  return UncertainSpec(vec({9, 5}), Matrix(Vector::Constant(2, 0.81).asDiagonal()), 3.0);
}

PerformanceSpec benchmark_pfs() {
  const double two_pi = 2.0 * std::numbers::pi;
  return {-24.0, RangeGrid::equidistant(two_pi * 6.5e9, two_pi * 7.5e9, 11)};
}

}  // namespace

TEST_CASE("sigma_mc") {
  CHECK(sigma_mc(0.5, 2500) == 0.01);
  CHECK(sigma_mc(1.0, 100) == 0.0);
  CHECK(sigma_mc(0.0, 100) == 0.0);
  CHECK(sigma_mc(0.428, 100) == doctest::Approx(0.049478884385159696).epsilon(1e-14));
  CHECK(worst_case_sample_size(0.01) == 2500);
  CHECK(worst_case_sample_size(0.05) == 100);
}

TEST_CASE("constant safe model gives yield one") {
  const ConstantModel model(-30.0);
  const auto r = estimate_yield_mc(model, benchmark_pfs(), benchmark_spec(), vec({1, 1}), 500, {1, 0});
  CHECK(r.estimate.value == 1.0);
  CHECK(r.estimate.sigma == 0.0);
  CHECK(r.estimate.n_samples == 500);
  CHECK(r.estimate.accepted.count == 500);
  CHECK(r.estimate.qoi_evals == 500 * 11);
  CHECK(r.estimate.full_model_evals == 500 * 11);
}

TEST_CASE("accepted statistics are flagged when fewer than two samples pass") {
  const ConstantModel model(0.0);
  const auto r = estimate_yield_mc(model, benchmark_pfs(), benchmark_spec(), vec({1, 1}), 50, {1, 0});
  CHECK(r.estimate.value == 0.0);
  CHECK_FALSE(r.estimate.accepted.defined);
}

TEST_CASE("estimate is consistent with its indicators and reproducible") {
  const HalfspaceOracle oracle(vec({1, 0}), 9.3);
  const auto a = estimate_yield_mc(oracle, oracle.performance_spec(), benchmark_spec(), Vector(), 777, {5, 2});
  const auto b = estimate_yield_mc(oracle, oracle.performance_spec(), benchmark_spec(), Vector(), 777, {5, 2});
  std::size_t count = 0;
  for (auto v : a.classification.inside) {
    count += v;
  }
  CHECK(a.estimate.value == static_cast<double>(count) / 777.0);
  CHECK(a.estimate.sigma == sigma_mc(a.estimate.value, 777));
  CHECK(a.estimate.value == b.estimate.value);
  CHECK((a.samples.offsets.array() == b.samples.offsets.array()).all());
}

TEST_CASE("accepted moments use the population convention") {
  const ConstantModel model(-1.0);
  SampleSet s{Vector::Zero(1), Matrix(1, 4)};
  s.offsets << 1.0, 2.0, 3.0, 4.0;
  MonteCarloClassifier mc(model);
  const PerformanceSpec spec{0.0, RangeGrid({0.0})};
  const YieldEstimate e = summarize(mc.classify(spec, s, Vector()), s);
  REQUIRE(e.accepted.defined);
  CHECK(e.accepted.mean[0] == doctest::Approx(2.5));
  CHECK(e.accepted.covariance(0, 0) == doctest::Approx(1.25));
}

TEST_CASE("median half-space yield is one half within MC noise") {
  const HalfspaceOracle oracle(vec({1}), 0.0);
  const UncertainSpec unit(Vector::Zero(1), Matrix::Identity(1, 1), 8.0);
  const auto r = estimate_yield_mc(oracle, oracle.performance_spec(), unit, Vector(), 2500, {3, 0});
  CHECK(std::abs(r.estimate.value - 0.5) <= 4 * 0.01);
}

TEST_CASE("MC estimate is unbiased on the half-space oracle") {
  const HalfspaceOracle oracle(vec({0.6, 0.8}), 0.5);
  const UncertainSpec spec(Vector::Zero(2), Matrix::Identity(2, 2), 8.0);
  const double exact = oracle.yield(spec);
  const std::size_t n = 2500;
  const int seeds = 200;
  double sum = 0.0;
  int within = 0;
  for (int s = 0; s < seeds; ++s) {
    const auto r = estimate_yield_mc(oracle, oracle.performance_spec(), spec, Vector(), n,
                                     {static_cast<std::uint64_t>(s), 11});
    sum += r.estimate.value;
    within += std::abs(r.estimate.value - exact) <= 4.0 * sigma_mc(exact, n) ? 1 : 0;
  }
  CHECK(std::abs(sum / seeds - exact) < 3.0 * sigma_mc(exact, n) / std::sqrt(seeds));
  CHECK(within == seeds);
}

TEST_CASE("hybrid on a constant model needs only the initial design") {
  const ConstantModel model(-30.0);
  const auto r = estimate_yield_hybrid(model, benchmark_pfs(), benchmark_spec(), vec({1, 1}), 400,
                                       {1, 0}, 3.0, 20);
  CHECK(r.estimate.value == 1.0);
  CHECK(r.estimate.full_model_evals == 20 * 11);
  CHECK(r.estimate.qoi_evals == 400 * 11);
  for (auto c : r.classification.critical) {
    CHECK(c == 0);
  }
}

TEST_CASE("hybrid with gamma zero trusts the surrogate everywhere") {
  const WaveguideModel model{WaveguideConfig{}};
  const auto r = estimate_yield_hybrid(model, benchmark_pfs(), benchmark_spec(), vec({1, 1}), 500,
                                       {2, 0}, 0.0, 20);
  CHECK(r.estimate.full_model_evals == 20 * 11);
  CHECK(r.estimate.value >= 0.0);
  CHECK(r.estimate.value <= 1.0);
}

TEST_CASE("hybrid agrees with classic MC on the waveguide benchmark") {
  const WaveguideModel model{WaveguideConfig{}};
  const RngStream stream{1, 0};
  const auto classic = estimate_yield_mc(model, benchmark_pfs(), benchmark_spec(), vec({1, 1}), 2500, stream);
  const auto hybrid = estimate_yield_hybrid(model, benchmark_pfs(), benchmark_spec(), vec({1, 1}), 2500,
                                            stream, 3.0, 20);
  std::size_t agree = 0;
  for (std::size_t i = 0; i < 2500; ++i) {
    agree += classic.classification.inside[i] == hybrid.classification.inside[i] ? 1 : 0;
  }
  CHECK(static_cast<double>(agree) / 2500.0 >= 0.99);
  CHECK(hybrid.estimate.full_model_evals < classic.estimate.full_model_evals / 2);
  for (std::size_t i = 0; i < 2500; ++i) {
    if (hybrid.classification.critical[i]) {
      CHECK(hybrid.classification.true_evaluated[i]);
    }
  }
}

TEST_CASE("hybrid evaluates every gamma-band sample with the true model") {
  const WaveguideModel model{WaveguideConfig{}};
  const PerformanceSpec pfs = benchmark_pfs();
  const UncertainSpec uspec = benchmark_spec();
  const Vector d = vec({1, 1});
  const SampleSet samples = draw_samples(uspec, 600, {4, 0});
  HybridSettings settings;
  HybridClassifier hybrid(model, settings);
  const Classification c = hybrid.classify(pfs, samples, d);
  // The surrogate is frozen during classify, so its current state is the one
  // that made every decision.
  const auto& gps = hybrid.surrogates();
  REQUIRE(gps.size() == pfs.grid.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    Vector x(4);
    x << samples.point(i), d;
    bool uncertain = false;
    bool violated = false;
    for (const auto& gp : gps) {
      const GprPrediction p = gp.predict(x);
      const double margin = p.mean - pfs.threshold;
      violated = violated || margin > settings.gamma * p.stddev;
      uncertain = uncertain || std::abs(margin) <= settings.gamma * p.stddev;
    }
    if (uncertain && !violated) {
      CHECK(c.true_evaluated[i]);
    }
  }
}

TEST_CASE("hybrid preconditions") {
  const ConstantModel model(-30.0);
  CHECK_THROWS_AS(estimate_yield_hybrid(model, benchmark_pfs(), benchmark_spec(), vec({1, 1}), 10,
                                        {1, 0}, 3.0, 20),
                  ConfigurationError);
  CHECK_THROWS_AS(estimate_yield_hybrid(model, benchmark_pfs(), benchmark_spec(), vec({1, 1}), 10,
                                        {1, 0}, 3.0, 1),
                  ConfigurationError);
}
