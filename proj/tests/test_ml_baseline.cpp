#include "support.hpp"
#include "tailtest/ml_baseline.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

using namespace tailtest;

namespace {

bool monotone(const std::vector<double>& trace) {
  for (std::size_t i = 1; i < trace.size(); ++i) {
    if (trace[i] < trace[i - 1] - 1e-9 * std::fabs(trace[i - 1])) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("one iteration in the Gaussian limit gives mean and denominator-n covariance") {
  const Sample x = sample({Vector::Zero(2), Matrix::Identity(2, 2), 1e9}, 200, 1);
  EmOptions o;
  o.nu_fixed = 1e6;
  o.max_iter = 1;
  o.init = TParams{Vector::Constant(2, 0.3), Matrix::Identity(2, 2) * 2.0, 1e6};
  const MlFit fit = em_fit(x, o);
  const Vector mean = x.colwise().mean().transpose();
  const Matrix c = x.rowwise() - mean.transpose();
  CHECK((fit.params.mu - mean).cwiseAbs().maxCoeff() < 1e-4);
  CHECK((fit.params.sigma - c.transpose() * c / 200.0).cwiseAbs().maxCoeff() < 1e-4);
}

TEST_CASE("log-likelihood never decreases") {
  Rng rng(2);
  for (int i = 0; i < 20; ++i) {
    const Index k = 1 + i % 4;
    TParams p = testsupport::random_params(k, rng);
    p.nu = 1.0 + 0.5 * i;
    const Sample x = sample(p, 150, 100 + static_cast<std::uint64_t>(i));
    const MlFit free = em_fit(x);
    CAPTURE(i);
    CHECK(free.converged);
    CHECK(monotone(free.trace));
    CHECK(free.loglik == doctest::Approx(log_likelihood(x, free.params)).epsilon(1e-10));
    EmOptions o;
    o.nu_fixed = 4.0;
    const MlFit con = em_fit(x, o);
    CHECK(monotone(con.trace));
    CHECK(con.params.nu == 4.0);
  }
}

TEST_CASE("nu score vanishes at the free optimum") {
  const Sample x = sample({Vector::Zero(2), Matrix::Identity(2, 2), 6.0}, 800, 3);
  const MlFit fit = em_fit(x);
  REQUIRE(fit.converged);
  std::vector<double> delta;
  for (Index i = 0; i < x.rows(); ++i) delta.push_back(mahalanobis_sq(x.row(i).transpose(), fit.params));
  CHECK(std::fabs(nu_score_sum(delta, 2, fit.params.nu)) < 1e-2);
  // and it is the profile maximum over nu
  EmOptions o;
  o.init = fit.params;
  for (double shift : {-0.5, 0.5}) {
    o.nu_fixed = fit.params.nu + shift;
    CHECK(em_fit(x, o).loglik < fit.loglik);
  }
}

TEST_CASE("constrained fit at the free estimate reproduces the free log-likelihood") {
  const Sample x = sample({Vector::Constant(3, 1.0), Matrix::Identity(3, 3), 5.0}, 500, 4);
  const MlFit free = em_fit(x);
  EmOptions o;
  o.nu_fixed = free.params.nu;
  const MlFit con = em_fit(x, o);
  CHECK(std::fabs(con.loglik - free.loglik) < 1e-6);
}

TEST_CASE("likelihood ratio statistic is affine invariant and nonnegative") {
  Rng rng(5);
  const Sample x = sample({Vector::Zero(3), testsupport::random_spd(3, rng), 5.0}, 300, 6);
  Matrix a = testsupport::random_spd(3, rng);
  a(2, 0) += 1.0;
  const Vector b = testsupport::random_vector(3, rng, 10.0);
  const Sample y = (x * a.transpose()).rowwise() + b.transpose();
  const LrResult lx = lr_test(x, 5.0, 0.05);
  const LrResult ly = lr_test(y, 5.0, 0.05);
  CHECK(lx.report.statistic >= 0.0);
  CHECK(std::fabs(lx.report.statistic - ly.report.statistic) < 1e-6);
  CHECK(lx.report.estimator == "lr");
  CHECK(lx.starts.size() == 4);
  for (double nu0 : {1.0, 3.0, 50.0}) CHECK(lr_test(x, nu0, 0.05).report.statistic >= 0.0);
}

TEST_CASE("free estimate of nu is close to the truth in large samples") {
  std::vector<double> estimates;
  for (int r = 0; r < 15; ++r) {
    const Sample x = sample({Vector::Zero(2), Matrix::Identity(2, 2), 5.0}, 5000, 200 + static_cast<std::uint64_t>(r));
    estimates.push_back(em_fit(x).params.nu);
  }
  std::nth_element(estimates.begin(), estimates.begin() + 7, estimates.end());
  CHECK(std::fabs(estimates[7] - 5.0) < 0.75);
}

TEST_CASE("em preconditions") {
  const Sample x = sample({Vector::Zero(3), Matrix::Identity(3, 3), 5.0}, 4, 1);
  CHECK_THROWS_AS((void)em_fit(x), std::invalid_argument);
  const Sample y = sample({Vector::Zero(1), Matrix::Identity(1, 1), 5.0}, 30, 1);
  EmOptions o;
  o.nu_fixed = 0.0;
  CHECK_THROWS_AS((void)em_fit(y, o), std::domain_error);
}
