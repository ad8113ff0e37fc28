#pragma once

#include "tailtest/random.hpp"

namespace tailtest {

// All functions throw std::domain_error outside their domain.

[[nodiscard]] double log_gamma(double z);

/// psi(z) = d/dz log Gamma(z), z > 0.
[[nodiscard]] double digamma(double z);

/// psi'(z), z > 0.
[[nodiscard]] double trigamma(double z);

[[nodiscard]] double std_normal_cdf(double x);

/// Phi^{-1}(p) for p in (0, 1).
[[nodiscard]] double std_normal_quantile(double p);

/// Upper-tail normal quantile z_alpha = Phi^{-1}(1 - alpha).
[[nodiscard]] double upper_normal_quantile(double alpha);

/// Regularized incomplete beta I_x(a, b).
[[nodiscard]] double incomplete_beta(double a, double b, double x);

/// P(F <= x) for F ~ F(d1, d2).
[[nodiscard]] double f_cdf(double d1, double d2, double x);

/// Quantile of F(d1, d2), by bisection on f_cdf.
[[nodiscard]] double f_quantile(double d1, double d2, double p);

/// P(X <= x) for X ~ chi-square(dof).
[[nodiscard]] double chi_square_cdf(double dof, double x);

/// One chi-square(dof) draw, dof > 0 and not necessarily integer.
[[nodiscard]] double chi_square_sample(double dof, Rng& rng);

}  // namespace tailtest
