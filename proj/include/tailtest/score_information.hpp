#pragma once

#include "tailtest/matrix_kit.hpp"
#include "tailtest/student_model.hpp"

namespace tailtest {

/// Gradient of the log density in (mu, vech(Sigma), nu) at one observation.
struct ScoreVector {
  Vector mu_part;     // k
  Vector sigma_part;  // k(k+1)/2
  double nu_part = 0.0;

  /// (mu_part', sigma_part', nu_part)'.
  [[nodiscard]] Vector stacked() const;
};

/// Block Fisher information; the (mu, Sigma) and (mu, nu) blocks vanish.
struct FisherInfo {
  Matrix g11;  // k x k
  Matrix g22;  // q x q
  Vector g23;  // q
  double g33 = 0.0;
  double g33_star = 0.0;  // g33 - g23' g22^{-1} g23

  /// The full (k + q + 1) square matrix, zeros in the off-diagonal mu blocks.
  [[nodiscard]] Matrix assembled() const;
};

/// Information for nu alone: depends on nu and k only.
[[nodiscard]] double gamma33(double nu, Index k);

/**
 * Score evaluation with everything that depends only on the parameters
 * (root of the scatter, P_k (Sigma^{-1/2})^{(x)2}, c'/c) computed once.
 */
class ScoreEvaluator {
 public:
  explicit ScoreEvaluator(const TParams& p);

  [[nodiscard]] ScoreVector operator()(const Eigen::Ref<const Vector>& x) const;

  /// Column sums of the three score blocks over the rows of a sample.
  struct Sums {
    Vector mu;
    Vector sigma;
    double nu = 0.0;
    Index n = 0;
  };
  [[nodiscard]] Sums sum_over(const Sample& data) const;

  [[nodiscard]] const StudentDensity& density() const { return density_; }

  /// (1/2) P_k (Sigma^{-1/2})^{(x)2}: maps vec(w u u' - I) to the Sigma-score.
  [[nodiscard]] const Matrix& sigma_map() const { return sigma_map_; }

 private:
  StudentDensity density_;
  Matrix sigma_map_;
  double dlog_c_ = 0.0;
};

[[nodiscard]] ScoreVector score(const Vector& x, const TParams& p);

/// Closed-form block information, assembled through explicit P_k, K_k, J_k products.
[[nodiscard]] FisherInfo fisher_info(const TParams& p);

/// Efficient information for nu under unspecified (mu, Sigma). Always > 0.
[[nodiscard]] double efficient_info(const TParams& p);

/// k = 1 closed form of the efficient information; free of location and scale.
[[nodiscard]] double univariate_efficient_info(double nu);

/**
 * k = 1 efficient-score summand at one observation:
 *   (nu+3)/(2 nu^2) z^2/(1+z^2/nu) - (1/2) log(1+z^2/nu) + c'_nu/c_nu - 1/(nu(nu+1)),
 * with z = (x - mu)/sigma and sigma the scale (sigma^2 = Sigma).
 *
 * The c'/c term enters with a plus sign; that is what the general
 * nu-score minus its projection on the scatter score reduces to at k = 1.
 */
[[nodiscard]] double univariate_efficient_score(double x, double mu, double sigma, double nu);

}  // namespace tailtest
