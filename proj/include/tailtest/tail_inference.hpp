#pragma once

#include "tailtest/matrix_kit.hpp"
#include "tailtest/nuisance_estimation.hpp"
#include "tailtest/score_information.hpp"
#include "tailtest/student_model.hpp"

#include <optional>
#include <string>
#include <string_view>

namespace tailtest {

/// Alternative direction. Greater means H1: nu > nu0, which shifts Q upward.
enum class Side { Two, Greater, Less };

[[nodiscard]] std::string_view side_name(Side side);
[[nodiscard]] std::optional<Side> parse_side(std::string_view name);

/// n^{-1/2}-normalized sums of the Sigma- and nu-score blocks.
struct CentralSequence {
  Vector delta2;
  double delta3 = 0.0;
  Index n = 0;
};

[[nodiscard]] CentralSequence central_sequence(const Sample& data, const TParams& p);

/**
 * The nu-score made orthogonal to the scatter score at fixed parameters:
 * Delta3* = Delta3 - Gamma23' Gamma22^{-1} Delta2, with info() = Gamma33*.
 */
class EfficientScore {
 public:
  explicit EfficientScore(const TParams& p);

  [[nodiscard]] double central_sequence(const Sample& data) const;
  [[nodiscard]] double info() const { return info_; }
  /// Gamma22^{-1} Gamma23.
  [[nodiscard]] const Vector& projection() const { return projection_; }
  [[nodiscard]] const TParams& params() const { return scores_.density().params(); }

 private:
  ScoreEvaluator scores_;
  Vector projection_;
  double info_ = 0.0;
};

[[nodiscard]] double efficient_central_sequence(const Sample& data, const TParams& p);

struct TestReport {
  double statistic = 0.0;
  Side side = Side::Two;
  double alpha = 0.05;
  double p_value = 1.0;
  bool reject = false;
  double nu0 = 0.0;
  std::string estimator;  // nuisance method tag, or "lr"
  Index n = 0;
  std::optional<double> predicted_power;
};

/// Q with its ingredients and the nuisance estimate it was computed at.
struct QStatistic {
  double q = 0.0;
  double delta3_star = 0.0;
  double info = 0.0;
  NuisanceEstimate nuisance;
};

/// Q = Delta3*(mu_hat, Sigma_hat, nu0) / sqrt(Gamma33*(mu_hat, Sigma_hat, nu0)).
[[nodiscard]] QStatistic q_statistic(const Sample& data, const NuisanceEstimate& nuisance);
[[nodiscard]] QStatistic q_statistic(const Sample& data, double nu0, NuisanceMethod method,
                                     const McdOptions& mcd = {});

/// Standard normal reference: two-sided 2(1 - Phi(|q|)), greater 1 - Phi(q), less Phi(q).
[[nodiscard]] double p_value(double statistic, Side side);

/// Fill p-value and decision from a standard-normal statistic.
[[nodiscard]] TestReport make_normal_report(double statistic, double nu0, Side side, double alpha,
                                            std::string estimator, Index n);

struct TestOptions {
  Side side = Side::Two;
  double alpha = 0.05;
  NuisanceMethod method = NuisanceMethod::MeCov;
  McdOptions mcd;
  std::optional<double> tau3;  // when set, the report carries the asymptotic power
};

[[nodiscard]] TestReport test_tail_weight(const Sample& data, double nu0, const TestOptions& options = {});

/// Local power for nu = nu0 + n^{-1/2} tau3, from the efficient information.
[[nodiscard]] double asymptotic_power_from_info(double info, double tau3, Side side, double alpha);

/// As above with Gamma33* evaluated at (p.mu, p.sigma, nu0); p.nu is ignored.
[[nodiscard]] double asymptotic_power(double nu0, double tau3, const TParams& p, Side side, double alpha);

/// Test under a known scatter: Delta3(mu_hat, Sigma, nu0) / sqrt(Gamma33(nu0)).
[[nodiscard]] TestReport specified_scatter_test(const Sample& data, double nu0, const Matrix& sigma_known,
                                                double alpha, Side side = Side::Two,
                                                NuisanceMethod location_method = NuisanceMethod::MeCov);

/// tau3 (sqrt(Gamma33) - sqrt(Gamma33*)).
[[nodiscard]] double efficiency_loss(double nu0, double tau3, const TParams& p);

struct IntervalOptions {
  double level = 0.95;
  NuisanceMethod method = NuisanceMethod::MeCov;
  double lower = 0.5;
  double upper = 200.0;
  int grid_points = 48;
  double tolerance = 1e-3;
  McdOptions mcd;
};

struct ConfidenceInterval {
  double lo = 0.0;
  double hi = 0.0;
  double level = 0.95;
  NuisanceMethod method = NuisanceMethod::MeCov;
  bool empty = false;
  bool monotone = true;     // Q was non-increasing over the scan grid
  bool lower_open = false;  // acceptance region reaches the bracket's lower end
  bool upper_open = false;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  std::optional<double> nu_at_zero;  // nu0 with Q(nu0) = 0
};

/// Values nu0 at which neither one-sided test at level (1 - level)/2 rejects,
/// taken as the connected region around the downward zero crossing of Q.
[[nodiscard]] ConfidenceInterval confidence_interval(const Sample& data, const IntervalOptions& options = {});

struct OneStepEstimate {
  double nu_prelim = 0.0;
  double nu_cam = 0.0;
  double info_used = 0.0;  // Gamma33* at the preliminary estimate
  double se = 0.0;         // 1 / sqrt(n Gamma33*)
  double delta3_star = 0.0;
  bool prelim_clamped = false;
  bool prelim_supplied = false;
  NuisanceMethod method = NuisanceMethod::MeCov;
  Index n = 0;
};

/// nu_prelim + n^{-1/2} Delta3* / Gamma33*, all evaluated at the preliminary estimate.
/// The default preliminary is the moment estimator.
[[nodiscard]] OneStepEstimate one_step_estimator(const Sample& data, NuisanceMethod method,
                                                 std::optional<double> prelim = std::nullopt,
                                                 const McdOptions& mcd = {});

}  // namespace tailtest
