#include "tailtest/special_functions.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

#include <doctest.h>

#include <cmath>

using namespace tailtest;

namespace {
const double kArgs[] = {0.05, 0.3, 0.5, 1.0, 1.5, 2.5, 3.0, 5.5, 7.9, 8.0, 12.5, 50.0, 250.0, 1e4};
}

TEST_CASE("digamma and trigamma against boost") {
  for (double z : kArgs) {
    CAPTURE(z);
    CHECK(digamma(z) == doctest::Approx(boost::math::digamma(z)).epsilon(1e-13));
    CHECK(trigamma(z) == doctest::Approx(boost::math::trigamma(z)).epsilon(1e-13));
  }
}

TEST_CASE("digamma known values") {
  const double euler = 0.5772156649015329;
  CHECK(digamma(1.0) == doctest::Approx(-euler).epsilon(1e-14));
  CHECK(digamma(0.5) == doctest::Approx(-euler - 2.0 * std::log(2.0)).epsilon(1e-14));
  CHECK(trigamma(1.0) == doctest::Approx(M_PI * M_PI / 6.0).epsilon(1e-14));
  CHECK(trigamma(0.5) == doctest::Approx(M_PI * M_PI / 2.0).epsilon(1e-14));
}

TEST_CASE("digamma is the derivative of log gamma") {
  for (double z : {0.7, 2.0, 9.3, 40.0}) {
    const double h = 1e-5 * z;
    const double fd = (log_gamma(z + h) - log_gamma(z - h)) / (2 * h);
    CHECK(digamma(z) == doctest::Approx(fd).epsilon(1e-8));
    const double fd2 = (digamma(z + h) - digamma(z - h)) / (2 * h);
    CHECK(trigamma(z) == doctest::Approx(fd2).epsilon(1e-7));
  }
}

TEST_CASE("normal cdf and quantile against boost") {
  const boost::math::normal_distribution<double> n01;
  for (double p : {1e-12, 1e-6, 0.001, 0.025, 0.05, 0.3, 0.5, 0.7, 0.975, 0.999999}) {
    CAPTURE(p);
    CHECK(std_normal_quantile(p) == doctest::Approx(boost::math::quantile(n01, p)).epsilon(1e-13));
  }
  for (double x : {-9.0, -3.0, -1.0, 0.0, 0.4, 2.5, 8.0}) {
    CHECK(std_normal_cdf(x) == doctest::Approx(boost::math::cdf(n01, x)).epsilon(1e-14));
  }
  CHECK(upper_normal_quantile(0.025) == doctest::Approx(1.959963984540054).epsilon(1e-14));
}

TEST_CASE("incomplete beta and F distribution against boost") {
  for (double a : {0.5, 1.0, 3.0, 11.0}) {
    for (double b : {0.5, 2.5, 40.0}) {
      for (double x : {0.01, 0.3, 0.5, 0.9, 0.999}) {
        CHECK(incomplete_beta(a, b, x) == doctest::Approx(boost::math::ibeta(a, b, x)).epsilon(1e-12));
      }
    }
  }
  for (double d1 : {1.0, 2.0, 6.0}) {
    for (double d2 : {0.5, 1.0, 5.0, 30.0}) {
      const boost::math::fisher_f_distribution<double> f(d1, d2);
      for (double p : {0.1, 0.5, 0.9}) {
        CAPTURE(d1);
        CAPTURE(d2);
        CAPTURE(p);
        CHECK(f_quantile(d1, d2, p) == doctest::Approx(boost::math::quantile(f, p)).epsilon(1e-9));
        const double x = boost::math::quantile(f, p);
        CHECK(f_cdf(d1, d2, x) == doctest::Approx(p).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("chi-square cdf against boost") {
  for (double dof : {1.0, 2.0, 5.5, 30.0}) {
    const boost::math::chi_squared_distribution<double> c(dof);
    for (double x : {0.001, 0.5, 1.0, 3.84, 10.0, 60.0}) {
      CHECK(chi_square_cdf(dof, x) == doctest::Approx(boost::math::cdf(c, x)).epsilon(1e-12));
    }
  }
  CHECK(1.0 - chi_square_cdf(1.0, 3.841458820694124) == doctest::Approx(0.05).epsilon(1e-12));
}

TEST_CASE("chi-square sampler mean and variance") {
  Rng rng(17);
  const double dof = 3.5;
  const int n = 200000;
  double s = 0.0;
  double s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = chi_square_sample(dof, rng);
    s += x;
    s2 += x * x;
  }
  const double mean = s / n;
  const double var = s2 / n - mean * mean;
  CHECK(std::fabs(mean - dof) < 4.0 * std::sqrt(2.0 * dof / n));
  CHECK(var == doctest::Approx(2.0 * dof).epsilon(0.03));
}

TEST_CASE("domain errors") {
  CHECK_THROWS((void)std_normal_quantile(0.0));
  CHECK_THROWS((void)std_normal_quantile(1.0));
  CHECK_THROWS((void)f_quantile(1.0, 1.0, 1.5));
}
