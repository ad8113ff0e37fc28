#pragma once

#include "tailtest/student_model.hpp"
#include "tailtest/tail_inference.hpp"

#include <optional>
#include <vector>

namespace tailtest {

struct EmOptions {
  std::optional<double> nu_fixed;  // constrained fit when set
  std::optional<TParams> init;
  double tol = 1e-8;  // absolute change in log-likelihood
  int max_iter = 2000;
};

struct MlFit {
  TParams params;
  double loglik = 0.0;
  int iterations = 0;
  bool converged = false;
  std::optional<double> nu_fixed;
  int restarts = 0;
  std::vector<double> trace;  // log-likelihood after every iteration, starting at the initial value
};

/// Bracket searched by the nu update.
inline constexpr double kEmNuMin = 0.1;
inline constexpr double kEmNuMax = 500.0;

/**
 * ECME fit of the multivariate t.
 *
 * E-step weights u_i = (nu + k)/(nu + delta_i); M-step weighted mean and
 * (1/n) sum u_i (x_i - mu)(x_i - mu)'. With nu free, nu then maximizes the
 * observed log-likelihood at the new (mu, Sigma) by a safeguarded Newton
 * search for the root of the nu-score on [0.1, 500]. Both steps are
 * conditional maximizations, so the log-likelihood never decreases.
 */
[[nodiscard]] MlFit em_fit(const Sample& data, const EmOptions& options = {});

/// Value of the summed nu-score at fixed (mu, Sigma) given squared distances.
[[nodiscard]] double nu_score_sum(const std::vector<double>& delta, Index k, double nu);

struct LrResult {
  TestReport report;  // statistic = 2 (loglik_free - loglik_constrained)
  MlFit constrained;
  MlFit free;
  std::vector<MlFit> starts;      // every free-fit start, in start order
  double start_nu_spread = 0.0;   // max - min of nu_hat across converged starts
  double start_loglik_spread = 0.0;
};

/// Likelihood-ratio test of nu = nu0 against a chi-square(1) reference.
/// Throws std::runtime_error when the constrained fit or every free start fails.
[[nodiscard]] LrResult lr_test(const Sample& data, double nu0, double alpha);

}  // namespace tailtest
