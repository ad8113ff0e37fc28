#include "support.hpp"
#include "tailtest/score_information.hpp"

#include <doctest.h>

#include <cmath>

using namespace tailtest;

namespace {

// E[g(d^2)] under t_nu in k dimensions, by radial quadrature.
template <class G>
double radial_expectation(G&& g, double nu, Index k) {
  const double kd = static_cast<double>(k);
  const double log_surface = std::log(2.0) + 0.5 * kd * std::log(M_PI) - std::lgamma(0.5 * kd);
  const double log_c = log_norm_const(nu, k);
  return testsupport::integrate_half_line(
      [&](double r) {
        const double d2 = r * r;
        const double log_w = log_surface + log_c + (kd - 1.0) * std::log(r) - 0.5 * (nu + kd) * std::log1p(d2 / nu);
        return g(d2) * std::exp(log_w);
      },
      40000);
}

double nu_score_of_d2(double d2, double nu, Index k) {
  const double kd = static_cast<double>(k);
  return dlog_norm_const_dnu(nu, k) - 0.5 * std::log1p(d2 / nu) + (nu + kd) / (2 * nu * nu) * d2 / (1 + d2 / nu);
}

}  // namespace

TEST_CASE("score blocks match finite differences of the log density") {
  Rng rng(29);
  for (int trial = 0; trial < 10; ++trial) {
    const Index k = 1 + trial % 3;
    const TParams p = testsupport::random_params(k, rng);
    const Vector x = p.mu + testsupport::random_vector(k, rng, 1.5);
    const ScoreVector s = score(x, p);
    for (Index i = 0; i < k; ++i) {
      const double fd = testsupport::central_difference(
          [&](double v) {
            TParams q = p;
            q.mu(i) = v;
            return log_density(x, q);
          },
          p.mu(i), 1e-6);
      CHECK(s.mu_part(i) == doctest::Approx(fd).epsilon(1e-6).scale(1.0));
    }
    const Vector h = vech(p.sigma);
    for (Index l = 0; l < h.size(); ++l) {
      const double fd = testsupport::central_difference(
          [&](double v) {
            Vector g = h;
            g(l) = v;
            TParams q = p;
            q.sigma = unvech(g);
            return log_density(x, q);
          },
          h(l), 1e-6);
      CHECK(s.sigma_part(l) == doctest::Approx(fd).epsilon(1e-6).scale(1.0));
    }
    const double fd = testsupport::central_difference(
        [&](double v) {
          TParams q = p;
          q.nu = v;
          return log_density(x, q);
        },
        p.nu, 1e-6 * p.nu);
    CHECK(s.nu_part == doctest::Approx(fd).epsilon(1e-6).scale(1.0));
  }
}

TEST_CASE("summed scores equal the sum of per-observation scores") {
  Rng rng(31);
  const TParams p = testsupport::random_params(3, rng);
  const Sample x = sample(p, 40, 5);
  const ScoreEvaluator ev(p);
  const auto sums = ev.sum_over(x);
  Vector mu = Vector::Zero(3);
  Vector sig = Vector::Zero(6);
  double nu = 0.0;
  for (Index i = 0; i < x.rows(); ++i) {
    const ScoreVector s = ev(x.row(i).transpose());
    mu += s.mu_part;
    sig += s.sigma_part;
    nu += s.nu_part;
  }
  CHECK((sums.mu - mu).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((sums.sigma - sig).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(sums.nu == doctest::Approx(nu).epsilon(1e-12));
  CHECK(sums.n == 40);
}

TEST_CASE("gamma33 equals the second moment of the nu-score") {
  for (Index k : {1, 2, 6}) {
    for (double nu : {1.0, 5.0, 10.0}) {
      const double mean = radial_expectation([&](double d2) { return nu_score_of_d2(d2, nu, k); }, nu, k);
      const double second = radial_expectation(
          [&](double d2) {
            const double s = nu_score_of_d2(d2, nu, k);
            return s * s;
          },
          nu, k);
      CAPTURE(k);
      CAPTURE(nu);
      CHECK(std::fabs(mean) < 1e-8);
      CHECK(gamma33(nu, k) == doctest::Approx(second).epsilon(1e-6));
    }
  }
}

TEST_CASE("Fisher information matches a Monte Carlo score covariance") {
  Matrix s(2, 2);
  s << 5, 3, 3, 2;
  const TParams p{Vector::Constant(2, 1.0), s, 5.0};
  const Sample x = sample(p, 100000, 37);
  const ScoreEvaluator ev(p);
  const Index dim = 2 + 3 + 1;
  Matrix scores(x.rows(), dim);
  for (Index i = 0; i < x.rows(); ++i) scores.row(i) = ev(x.row(i).transpose()).stacked().transpose();
  const Vector mean = scores.colwise().mean().transpose();
  const Matrix centered = scores.rowwise() - mean.transpose();
  const Matrix cov = centered.transpose() * centered / static_cast<double>(x.rows() - 1);
  const Matrix info = fisher_info(p).assembled();
  for (Index a = 0; a < dim; ++a) {
    for (Index b = 0; b < dim; ++b) {
      const Vector prod = centered.col(a).cwiseProduct(centered.col(b));
      const double se = std::sqrt((prod.array() - prod.mean()).square().sum() / (x.rows() - 1.0) / x.rows());
      CAPTURE(a);
      CAPTURE(b);
      CHECK(std::fabs(cov(a, b) - info(a, b)) < 4.5 * se + 1e-12);
    }
  }
}

TEST_CASE("information blocks have the documented structure") {
  Rng rng(41);
  const TParams p = testsupport::random_params(3, rng);
  const FisherInfo info = fisher_info(p);
  const double r = (p.nu + 3) / (p.nu + 5);
  CHECK((info.g11 - r * spd_inverse(p.sigma)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(info.g22.rows() == 6);
  CHECK(is_symmetric(info.g22, 1e-10));
  CHECK(info.g33 == doctest::Approx(gamma33(p.nu, 3)));
  const double star = info.g33 - info.g23.dot(spd_solve(info.g22, info.g23).col(0));
  CHECK(info.g33_star == doctest::Approx(star).epsilon(1e-12));
  CHECK(info.g33_star > 0.0);
  CHECK(info.g33_star < info.g33);
  const Matrix full = info.assembled();
  CHECK(full.rows() == 3 + 6 + 1);
  CHECK(Eigen::SelfAdjointEigenSolver<Matrix>(full).eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("efficient information is free of location and scatter") {
  Rng rng(43);
  for (Index k : {1, 2, 4}) {
    const TParams a = testsupport::random_params(k, rng);
    TParams b = testsupport::random_params(k, rng);
    b.nu = a.nu;
    CHECK(efficient_info(a) == doctest::Approx(efficient_info(b)).epsilon(1e-10));
  }
}

TEST_CASE("univariate efficient information") {
  for (double nu : {0.8, 1.0, 5.0, 10.0, 80.0}) {
    const TParams p{Vector::Zero(1), Matrix::Constant(1, 1, 9.0), nu};
    CHECK(univariate_efficient_info(nu) == doctest::Approx(efficient_info(p)).epsilon(1e-10));
  }
  CHECK(univariate_efficient_info(5.0) == doctest::Approx(1.6337e-3).epsilon(1e-4));
}

TEST_CASE("univariate efficient score: centered, orthogonal to the scale score, variance = information") {
  for (double nu : {1.0, 5.0, 12.0}) {
    const double mu = 0.4;
    const double sigma = 2.5;
    const TParams p{Vector::Constant(1, mu), Matrix::Constant(1, 1, sigma * sigma), nu};
    const auto dens = [&](double x) { return std::exp(log_density(Vector::Constant(1, x), p)); };
    const auto eff = [&](double x) { return univariate_efficient_score(x, mu, sigma, nu); };
    const double mean = testsupport::integrate_line([&](double x) { return eff(x) * dens(x); }, 40000, mu);
    const double var = testsupport::integrate_line([&](double x) { return eff(x) * eff(x) * dens(x); }, 40000, mu);
    const double cross = testsupport::integrate_line(
        [&](double x) { return eff(x) * score(Vector::Constant(1, x), p).sigma_part(0) * dens(x); }, 40000, mu);
    CAPTURE(nu);
    CHECK(std::fabs(mean) < 1e-8);
    CHECK(std::fabs(cross) < 1e-8);
    CHECK(var == doctest::Approx(univariate_efficient_info(nu)).epsilon(1e-6));
  }
}

TEST_CASE("univariate efficient score agrees with the general projection") {
  const double nu = 6.0;
  const TParams p{Vector::Constant(1, -1.0), Matrix::Constant(1, 1, 3.0), nu};
  const FisherInfo info = fisher_info(p);
  const double proj = info.g23(0) / info.g22(0, 0);
  for (double x : {-5.0, -1.0, 0.3, 7.0}) {
    const ScoreVector s = score(Vector::Constant(1, x), p);
    CHECK(univariate_efficient_score(x, -1.0, std::sqrt(3.0), nu) ==
          doctest::Approx(s.nu_part - proj * s.sigma_part(0)).epsilon(1e-12));
  }
}
