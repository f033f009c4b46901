#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

#include "yieldopt/deriv.hpp"
#include "yieldopt/errors.hpp"

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

UncertainSpec unit_1d(double mean = 0.0) {
  return UncertainSpec(Vector::Constant(1, mean), Matrix::Identity(1, 1), 8.0);
}

// Truncated-normal moments of the accepted set {p <= 1} under N(0, 1);
// tests/oracles/normal_oracle.py.
constexpr double kPhi1 = 0.84134474606854294859;
constexpr double kLambda = 0.28759997093917836123;
constexpr double kAcceptedVariance = 0.62968628577660540086;

YieldEstimate halfspace_moments() {
  YieldEstimate e;
  e.value = kPhi1;
  e.n_samples = 100000;
  e.accepted.count = 84134;
  e.accepted.defined = true;
  e.accepted.mean = Vector::Constant(1, -kLambda);
  e.accepted.covariance = Matrix::Constant(1, 1, kAcceptedVariance);
  return e;
}

double standard_error(const Vector& terms) {
  const double mean = terms.mean();
  const double var = (terms.array() - mean).square().sum() / static_cast<double>(terms.size() - 1);
  return std::sqrt(var / static_cast<double>(terms.size()));
}

}  // namespace

TEST_CASE("analytic gradient vanishes for a centered accepted set") {
  YieldEstimate e = halfspace_moments();
  e.accepted.mean = Vector::Zero(1);
  e.accepted.covariance = Matrix::Identity(1, 1);
  CHECK(grad_yield_mean(e, unit_1d())[0] == 0.0);
  CHECK(hess_yield_mean(e, unit_1d())(0, 0) == 0.0);
}

TEST_CASE("empty or full accepted sets are degenerate") {
  YieldEstimate e;
  e.value = 0.0;
  e.n_samples = 100;
  CHECK(is_degenerate(e));
  CHECK(grad_yield_mean(e, unit_1d())[0] == 0.0);
  CHECK(hess_yield_mean(e, unit_1d())(0, 0) == 0.0);
  e = halfspace_moments();
  CHECK_FALSE(is_degenerate(e));
  e.accepted.count = e.n_samples;
  CHECK(is_degenerate(e));
}

TEST_CASE("analytic gradient and Hessian reproduce the truncated-normal identities") {
  const YieldEstimate e = halfspace_moments();
  CHECK(grad_yield_mean(e, unit_1d())[0] == doctest::Approx(-0.2419707245191433498).epsilon(1e-12));
  CHECK(hess_yield_mean(e, unit_1d())(0, 0) == doctest::Approx(-0.24197072451914335).epsilon(1e-12));
}

TEST_CASE("analytic derivatives match the closed form on the half-space oracle") {
  const HalfspaceOracle oracle(vec({1}), 0.0);
  const double sigma = 1.5;
  for (double z : {-1.0, 0.0, 1.0}) {
    // offset - mean = z sigma
    const UncertainSpec spec(Vector::Constant(1, -z * sigma), Matrix::Constant(1, 1, sigma * sigma),
                             8.0 * sigma);
    const auto r = estimate_yield_mc(oracle, oracle.performance_spec(), spec, Vector(), 100000,
                                     {static_cast<std::uint64_t>(100 + 10 * z), 0});
    const double grad = grad_yield_mean(r.estimate, spec)[0];
    const double hess = hess_yield_mean(r.estimate, spec)(0, 0);
    const double exact_grad = oracle.yield_gradient_mean(spec)[0];
    const double exact_hess = oracle.yield_hessian_mean(spec)(0, 0);

    // The analytic gradient is the sample mean of 1_in(p) (p - mean) / sigma^2.
    Vector terms(static_cast<Eigen::Index>(r.samples.size()));
    for (std::size_t i = 0; i < r.samples.size(); ++i) {
      terms[static_cast<Eigen::Index>(i)] =
          r.classification.inside[i] * r.samples.offsets(0, static_cast<Eigen::Index>(i)) / (sigma * sigma);
    }
    CAPTURE(z);
    CHECK(std::abs(grad - exact_grad) <= 5.0 * standard_error(terms));
    // At z = 0 the exact Hessian vanishes; use the curvature scale phi / sigma^2.
    const double scale = std::max(std::abs(exact_hess), standard_normal_pdf(z) / (sigma * sigma));
    CHECK(std::abs(hess - exact_hess) <= 0.1 * scale);
  }
}

TEST_CASE("finite differences of a d-independent model are exactly zero") {
  const FunctionModel model([](const VectorRef& p, const VectorRef&, double) { return p[0]; });
  const PerformanceSpec spec{0.0, RangeGrid({0.0})};
  const SampleSet samples = draw_samples(unit_1d(), 1000, {1, 0});
  const FdGradient fd = fd_grad_det(model, spec, samples, vec({0.3, -2}), vec({0.1, 0.1}));
  CHECK(fd.gradient[0] == 0.0);
  CHECK(fd.gradient[1] == 0.0);
  CHECK(fd.yield_evals == 4);
  CHECK(fd.qoi_evals == 4000);
}

TEST_CASE("finite differences reuse the samples and match the closed form") {
  // Q = p - d, c = 0: Y = Phi(d - mean), dY/dd = phi(0) at d = mean
  const HalfspaceOracle oracle(vec({1}), 0.0, vec({1}));
  const std::size_t n = 100000;
  const double h = 0.1;
  const SampleSet samples = draw_samples(unit_1d(), n, {77, 0});
  const FdGradient fd = fd_grad_det(oracle, oracle.performance_spec(), samples, vec({0}), vec({h}));
  // Samples in (d - h, d + h] flip; their fraction q is binomial.
  const double q = standard_normal_cdf(h) - standard_normal_cdf(-h);
  const double noise = std::sqrt(q * (1 - q) / n) / (2 * h);
  const double bias = std::abs(q / (2 * h) - 0.39894228040143267794);
  CHECK(std::abs(fd.gradient[0] - 0.39894228040143267794) <= 3.0 * noise + bias);
}

TEST_CASE("finite differences in d agree with the analytic mean gradient on the shifted oracle") {
  // d enters exactly like a shift of the mean: dY/dd = -dY/dmean
  const HalfspaceOracle oracle(vec({1}), 0.5, vec({1}));
  const UncertainSpec spec = unit_1d();
  const std::size_t n = 100000;
  const double h = 0.1;
  const auto r = estimate_yield_mc(oracle, oracle.performance_spec(), spec, vec({0}), n, {8, 0});
  const FdGradient fd = fd_grad_det(oracle, oracle.performance_spec(), r.samples, vec({0}), vec({h}));
  const double analytic = -grad_yield_mean(r.estimate, spec)[0];

  Vector terms(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    terms[static_cast<Eigen::Index>(i)] = r.classification.inside[i] * r.samples.offsets(0, static_cast<Eigen::Index>(i));
  }
  const double z = 0.5;
  const double q = standard_normal_cdf(z + h) - standard_normal_cdf(z - h);
  const double fd_noise = std::sqrt(q * (1 - q) / n) / (2 * h);
  const double fd_bias = std::abs(q / (2 * h) - standard_normal_pdf(z));
  const double combined = std::hypot(fd_noise, standard_error(terms));
  CHECK(std::abs(fd.gradient[0] - analytic) <= 3.0 * combined + fd_bias);
}

TEST_CASE("central differences converge at second order") {
  const HalfspaceOracle oracle(vec({1}), 0.0, vec({1}));
  const SampleSet samples = draw_samples(unit_1d(), 4000000, {31, 0});
  const double exact = 0.39894228040143267794;
  double errors[3];
  const double steps[3] = {1.0, 0.5, 0.25};
  for (int k = 0; k < 3; ++k) {
    const FdGradient fd =
        fd_grad_det(oracle, oracle.performance_spec(), samples, vec({0}), vec({steps[k]}));
    errors[k] = std::abs(fd.gradient[0] - exact);
  }
  CAPTURE(errors[0]);
  CAPTURE(errors[1]);
  CAPTURE(errors[2]);
  CHECK(errors[0] / errors[1] == doctest::Approx(4.0).epsilon(0.25));
  CHECK(errors[1] / errors[2] == doctest::Approx(4.0).epsilon(0.25));
}

TEST_CASE("finite-difference steps are validated") {
  const ConstantModel model(0.0);
  const PerformanceSpec spec{0.0, RangeGrid({0.0})};
  const SampleSet samples = draw_samples(unit_1d(), 10, {1, 0});
  CHECK_THROWS_AS(fd_grad_det(model, spec, samples, vec({0}), vec({0})), ConfigurationError);
  CHECK_THROWS_AS(fd_grad_det(model, spec, samples, vec({0}), vec({-1})), ConfigurationError);
  CHECK_THROWS_AS(fd_grad_det(model, spec, samples, vec({0}), vec({1, 1})), ConfigurationError);
  CHECK(default_fd_steps(vec({0, 5000}))[0] == 1e-3);
  CHECK(default_fd_steps(vec({0, 5000}))[1] == doctest::Approx(5.0));
}

TEST_CASE("bfgs first call only records the point") {
  const BfgsUpdateResult r = bfgs_update(BfgsState::identity(2), vec({1, 2}), vec({3, 4}));
  CHECK_FALSE(r.applied);
  CHECK(r.state.has_previous);
  CHECK(r.state.hessian_approx == Matrix::Identity(2, 2));
}

TEST_CASE("bfgs update worked example") {
  BfgsState s = BfgsState::identity(2);
  s.prev_point = vec({0, 0});
  s.prev_gradient = vec({0, 0});
  s.has_previous = true;
  const BfgsUpdateResult r = bfgs_update(s, vec({1, 0}), vec({2, 0}));
  REQUIRE(r.applied);
  Matrix expected(2, 2);
  expected << 2, 0, 0, 1;
  CHECK((r.state.hessian_approx - expected).norm() < 1e-15);
  CHECK((r.state.hessian_approx * vec({1, 0}) - vec({2, 0})).norm() < 1e-15);
}

TEST_CASE("bfgs update with a satisfied secant leaves H unchanged") {
  BfgsState s = BfgsState::identity(2);
  s.prev_point = vec({0, 0});
  s.prev_gradient = vec({0, 0});
  s.has_previous = true;
  const BfgsUpdateResult r = bfgs_update(s, vec({1, 0}), vec({1, 0}));
  CHECK((r.state.hessian_approx - Matrix::Identity(2, 2)).norm() < 1e-15);
}

TEST_CASE("bfgs skips updates without curvature") {
  BfgsState s = BfgsState::identity(2);
  s.prev_point = vec({0, 0});
  s.prev_gradient = vec({0, 0});
  s.has_previous = true;
  const BfgsUpdateResult r = bfgs_update(s, vec({1, 0}), vec({-1, 0.5}));
  CHECK_FALSE(r.applied);
  CHECK(r.state.hessian_approx == Matrix::Identity(2, 2));
  CHECK(r.state.prev_point == vec({1, 0}));
}

TEST_CASE("bfgs dimension mismatch") {
  BfgsState s = BfgsState::identity(2);
  s.prev_point = vec({0, 0});
  s.prev_gradient = vec({0, 0});
  s.has_previous = true;
  CHECK_THROWS_AS(bfgs_update(s, vec({1, 0, 0}), vec({1, 0, 0})), ConfigurationError);
}

TEST_CASE("bfgs secant and symmetry over random update chains") {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int applied = 0;
  for (int chain = 0; chain < 100; ++chain) {
    BfgsState s = BfgsState::identity(4);
    Vector x = Vector::Zero(4);
    Vector g = Vector::Zero(4);
    s = bfgs_update(s, x, g).state;
    for (int k = 0; k < 10; ++k) {
      Vector step(4), dg(4);
      for (int i = 0; i < 4; ++i) {
        step[i] = u(gen);
        dg[i] = u(gen);
      }
      const Matrix before = s.hessian_approx;
      const BfgsUpdateResult r = bfgs_update(s, x + step, g + dg);
      if (r.applied) {
        ++applied;
        CHECK((r.state.hessian_approx * step - dg).norm() <= 1e-12 * std::max(1.0, dg.norm()));
        CHECK((r.state.hessian_approx - r.state.hessian_approx.transpose()).norm() <= 1e-12);
        CHECK(r.state.hessian_approx.llt().info() == Eigen::Success);
      } else {
        CHECK(r.state.hessian_approx == before);
      }
      s = r.state;
      x += step;
      g += dg;
    }
  }
  CHECK(applied > 100);
}

TEST_CASE("mixed Hessian keeps the BFGS blocks outside the uncertain block") {
  BfgsState s = BfgsState::identity(4);
  Matrix h(4, 4);
  h << 4, 1, 0.5, 0.2, 1, 3, 0.1, 0.3, 0.5, 0.1, 2, 0.4, 0.2, 0.3, 0.4, 5;
  s.hessian_approx = h;
  Matrix pp(2, 2);
  pp << 6, 0.5, 0.5, 7;
  const MixedHessian m = assemble_mixed_hessian(s, pp);
  REQUIRE(m.matrix.rows() == 4);
  CHECK(m.regularization == 0.0);
  CHECK(m.matrix.topLeftCorner(2, 2) == pp);
  CHECK(m.matrix.topRightCorner(2, 2) == h.topRightCorner(2, 2));
  CHECK(m.matrix.bottomLeftCorner(2, 2) == h.bottomLeftCorner(2, 2));
  CHECK(m.matrix.bottomRightCorner(2, 2) == h.bottomRightCorner(2, 2));

  const MixedHessian same = assemble_mixed_hessian(s, h.topLeftCorner(2, 2));
  CHECK(same.matrix == h);
  CHECK(same.regularization == 0.0);
}

TEST_CASE("mixed Hessian regularizes an indefinite insertion") {
  const MixedHessian m = assemble_mixed_hessian(BfgsState::identity(4), -Matrix::Identity(2, 2));
  CHECK(m.regularization >= 2.0);
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(m.matrix);
  CHECK(eig.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("mixed Hessian is positive definite for random inputs") {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const int np = 1 + trial % 3;
    const int nd = trial % 4;
    Matrix a(np + nd, np + nd);
    for (int i = 0; i < a.size(); ++i) {
      a.data()[i] = u(gen);
    }
    BfgsState s = BfgsState::identity(np + nd);
    s.hessian_approx = a * a.transpose() + 1e-3 * Matrix::Identity(np + nd, np + nd);
    Matrix pp(np, np);
    for (int i = 0; i < pp.size(); ++i) {
      pp.data()[i] = u(gen);
    }
    pp = 0.5 * (pp + pp.transpose());
    const MixedHessian m = assemble_mixed_hessian(s, pp);
    CHECK((m.matrix - m.matrix.transpose()).norm() == 0.0);
    CHECK(m.matrix.llt().info() == Eigen::Success);
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(m.matrix);
    CHECK(eig.eigenvalues().minCoeff() > 0.0);
  }
}
