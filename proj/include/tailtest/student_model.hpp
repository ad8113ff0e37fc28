#pragma once

#include "tailtest/matrix_kit.hpp"
#include "tailtest/random.hpp"

#include <cstdint>

namespace tailtest {

/// Parameters (mu, Sigma, nu) of the k-variate Student t distribution.
struct TParams {
  Vector mu;
  Matrix sigma;  // scatter, SPD
  double nu = 0.0;

  [[nodiscard]] Index dim() const { return mu.size(); }

  /// Throws std::invalid_argument / std::domain_error on inconsistent dims,
  /// non-SPD scatter or non-positive nu.
  void validate() const;
};

/// Observations stored row-wise: n x k.
using Sample = Matrix;

/// log c_{nu,k} = logGamma((nu+k)/2) - logGamma(nu/2) - (k/2) log(pi nu).
[[nodiscard]] double log_norm_const(double nu, Index k);

/// d/dnu log c_{nu,k} = c'_{nu,k} / c_{nu,k}.
[[nodiscard]] double dlog_norm_const_dnu(double nu, Index k);

/**
 * A t density with its scatter factorization cached, for repeated
 * evaluation at many points.
 */
class StudentDensity {
 public:
  explicit StudentDensity(TParams params);

  [[nodiscard]] const TParams& params() const { return params_; }
  [[nodiscard]] const Matrix& inv_root() const { return root_.inv_root; }
  [[nodiscard]] const Matrix& root() const { return root_.root; }
  [[nodiscard]] double log_det() const { return root_.log_det; }

  /// Sigma^{-1/2} (x - mu).
  [[nodiscard]] Vector standardize(const Eigen::Ref<const Vector>& x) const;

  [[nodiscard]] double mahalanobis_sq(const Eigen::Ref<const Vector>& x) const;
  [[nodiscard]] double log_density(const Eigen::Ref<const Vector>& x) const;

 private:
  TParams params_;
  SymRoot root_;
  double log_c_ = 0.0;
};

/// (x - mu)' Sigma^{-1} (x - mu).
[[nodiscard]] double mahalanobis_sq(const Vector& x, const TParams& p);

[[nodiscard]] double log_density(const Vector& x, const TParams& p);

/// Sum of log densities over the rows of a sample.
[[nodiscard]] double log_likelihood(const Sample& data, const TParams& p);

/// n draws X = mu + Sigma^{1/2} Z / sqrt(W / nu), Z ~ N_k(0, I), W ~ chi2(nu).
[[nodiscard]] Sample sample(const TParams& p, Index n, Rng& rng);
[[nodiscard]] Sample sample(const TParams& p, Index n, std::uint64_t seed);

}  // namespace tailtest
