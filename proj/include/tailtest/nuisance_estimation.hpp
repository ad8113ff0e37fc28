#pragma once

#include "tailtest/matrix_kit.hpp"
#include "tailtest/student_model.hpp"

#include <cstdint>
#include <optional>
#include <string_view>

namespace tailtest {

/// Root-n consistent location/scatter estimators usable under a fixed nu0.
enum class NuisanceMethod {
  MeCov,   // sample mean, S (1 - 2/nu0)
  MedMad,  // univariate median and calibrated MAD
  MOT,     // spatial median + scale-calibrated Tyler shape
  MCD,     // minimum covariance determinant (random starts + C-steps)
};

[[nodiscard]] std::string_view method_name(NuisanceMethod method);
[[nodiscard]] std::optional<NuisanceMethod> parse_method(std::string_view name);

struct NuisanceEstimate {
  Vector mu_hat;
  Matrix sigma_hat;
  NuisanceMethod method = NuisanceMethod::MeCov;
  double nu0 = 0.0;
  int iterations = 0;
  bool converged = true;

  [[nodiscard]] TParams params() const { return {mu_hat, sigma_hat, nu0}; }
};

struct McdOptions {
  double subset_fraction = 0.75;
  int n_starts = 50;
  std::uint64_t seed = 0;
};

/**
 * The nu0-free part of a nuisance estimate.
 *
 * Every supported method factors as location + nu0-independent shape times
 * a scalar that depends on nu0 only through a t-calibration constant, so a
 * fit can be reused across many candidate nu0 values.
 */
class NuisanceFit {
 public:
  NuisanceFit(NuisanceMethod method, Vector location, Matrix shape, double scale_statistic,
              int iterations, bool converged);

  [[nodiscard]] NuisanceMethod method() const { return method_; }
  [[nodiscard]] const Vector& location() const { return location_; }
  [[nodiscard]] const Matrix& shape() const { return shape_; }

  /// Scatter factor multiplying shape() under the null nu0.
  [[nodiscard]] double scale_factor(double nu0) const;

  [[nodiscard]] NuisanceEstimate at(double nu0) const;

 private:
  NuisanceMethod method_;
  Vector location_;
  Matrix shape_;
  double scale_statistic_;
  int iterations_;
  bool converged_;
};

[[nodiscard]] NuisanceFit fit_nuisance(const Sample& data, NuisanceMethod method,
                                       const McdOptions& mcd = {});

[[nodiscard]] NuisanceEstimate estimate_nuisance(const Sample& data, double nu0, NuisanceMethod method,
                                                 const McdOptions& mcd = {});

/// Sample mean and S (1 - 2/nu0), S with denominator n - 1. Needs nu0 > 2.
[[nodiscard]] NuisanceEstimate mecov(const Sample& data, double nu0);

/// Median and (MAD / q)^2 where q is the median of |t_{nu0}|. k = 1 only.
[[nodiscard]] NuisanceEstimate med_mad(const Sample& data, double nu0);

/// Median of |T| for T ~ t_nu (equals 1 for the Cauchy).
[[nodiscard]] double abs_t_median(double nu);

struct SpatialMedian {
  Vector location;
  int iterations = 0;
  bool converged = true;
};

/// Minimizer of sum_i ||x_i - m|| (modified Weiszfeld iteration).
[[nodiscard]] SpatialMedian spatial_median(const Sample& data);

/// Trace-normalized (tr V = k) Tyler shape about a given center.
struct TylerShape {
  Matrix shape;
  int iterations = 0;
};
[[nodiscard]] TylerShape tyler_shape(const Sample& data, const Vector& center);

/// Spatial median with Tyler shape rescaled by F(k, nu0)-median matching.
[[nodiscard]] NuisanceEstimate tyler_scatter(const Sample& data, double nu0);

[[nodiscard]] NuisanceEstimate mcd_lite(const Sample& data, double nu0, const McdOptions& options = {});

/// Default discretization constant; large enough to leave estimates unchanged in practice.
inline constexpr double kDefaultDiscretizationConstant = 1e6;

/// c0^{-1} n^{-1/2} sign(x) ceil(c0 n^{1/2} |x|), componentwise.
[[nodiscard]] double discretize(double value, Index n, double c0 = kDefaultDiscretizationConstant);
[[nodiscard]] Matrix discretize(const Matrix& value, Index n, double c0 = kDefaultDiscretizationConstant);

struct MomentEstimate {
  double nu = 0.0;
  double kurtosis = 0.0;  // Mardia's b_{2,k}
  bool clamped = false;
};

inline constexpr double kMomentNuMin = 4.5;
inline constexpr double kMomentNuMax = 200.0;

/// Mardia's multivariate kurtosis b_{2,k} (ML covariance).
[[nodiscard]] double mardia_kurtosis(const Sample& data);

/// Invert beta_{2,k} = k(k+2)(nu-2)/(nu-4), clamped to [4.5, 200].
[[nodiscard]] MomentEstimate moment_estimator_nu(const Sample& data);
[[nodiscard]] MomentEstimate moment_nu_from_kurtosis(double kurtosis, Index k);

}  // namespace tailtest
