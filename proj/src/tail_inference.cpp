#include "tailtest/tail_inference.hpp"

#include "tailtest/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace tailtest {

namespace {

void require_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
}

// Root of a function decreasing through `target` on [a, b] (f(a) > target >= f(b)).
double bisect_crossing(const std::function<double(double)>& f, double target, double a, double b,
                       double tolerance) {
  while (b - a > tolerance) {
    const double mid = 0.5 * (a + b);
    if (f(mid) > target) {
      a = mid;
    } else {
      b = mid;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

std::string_view side_name(Side side) {
  switch (side) {
    case Side::Two:
      return "two";
    case Side::Greater:
      return "greater";
    case Side::Less:
      return "less";
  }
  return "unknown";
}

std::optional<Side> parse_side(std::string_view name) {
  for (auto s : {Side::Two, Side::Greater, Side::Less}) {
    if (side_name(s) == name) return s;
  }
  return std::nullopt;
}

CentralSequence central_sequence(const Sample& data, const TParams& p) {
  const ScoreEvaluator scores(p);
  const auto sums = scores.sum_over(data);
  const double root_n = std::sqrt(static_cast<double>(data.rows()));
  return {sums.sigma / root_n, sums.nu / root_n, data.rows()};
}

EfficientScore::EfficientScore(const TParams& p) : scores_(p) {
  const FisherInfo info = fisher_info(p);
  projection_ = spd_solve(info.g22, info.g23);
  info_ = info.g33_star;
}

double EfficientScore::central_sequence(const Sample& data) const {
  if (data.rows() < 1) throw std::invalid_argument("central_sequence: empty sample");
  const auto sums = scores_.sum_over(data);
  const double root_n = std::sqrt(static_cast<double>(data.rows()));
  return (sums.nu - projection_.dot(sums.sigma)) / root_n;
}

double efficient_central_sequence(const Sample& data, const TParams& p) {
  return EfficientScore(p).central_sequence(data);
}

QStatistic q_statistic(const Sample& data, const NuisanceEstimate& nuisance) {
  const EfficientScore eff(nuisance.params());
  QStatistic out;
  out.delta3_star = eff.central_sequence(data);
  out.info = eff.info();
  out.q = out.delta3_star / std::sqrt(out.info);
  out.nuisance = nuisance;
  return out;
}

QStatistic q_statistic(const Sample& data, double nu0, NuisanceMethod method, const McdOptions& mcd) {
  return q_statistic(data, estimate_nuisance(data, nu0, method, mcd));
}

double p_value(double statistic, Side side) {
  switch (side) {
    case Side::Two:
      return std::min(1.0, std::erfc(std::fabs(statistic) / std::sqrt(2.0)));
    case Side::Greater:
      return std_normal_cdf(-statistic);
    case Side::Less:
      return std_normal_cdf(statistic);
  }
  throw std::logic_error("unknown side");
}

TestReport make_normal_report(double statistic, double nu0, Side side, double alpha, std::string estimator,
                              Index n) {
  require_alpha(alpha);
  TestReport r;
  r.statistic = statistic;
  r.side = side;
  r.alpha = alpha;
  r.p_value = p_value(statistic, side);
  r.reject = r.p_value < alpha;
  r.nu0 = nu0;
  r.estimator = std::move(estimator);
  r.n = n;
  return r;
}

TestReport test_tail_weight(const Sample& data, double nu0, const TestOptions& options) {
  require_alpha(options.alpha);
  const QStatistic q = q_statistic(data, nu0, options.method, options.mcd);
  TestReport report =
      make_normal_report(q.q, nu0, options.side, options.alpha, std::string(method_name(options.method)), data.rows());
  if (options.tau3) {
    report.predicted_power = asymptotic_power_from_info(q.info, *options.tau3, options.side, options.alpha);
  }
  return report;
}

double asymptotic_power_from_info(double info, double tau3, Side side, double alpha) {
  require_alpha(alpha);
  if (!(info > 0.0)) throw std::domain_error("asymptotic_power: information must be positive");
  const double shift = tau3 * std::sqrt(info);
  switch (side) {
    case Side::Two: {
      const double z = upper_normal_quantile(alpha / 2.0);
      return 1.0 - std_normal_cdf(z - shift) + std_normal_cdf(-z - shift);
    }
    case Side::Greater:
      return 1.0 - std_normal_cdf(upper_normal_quantile(alpha) - shift);
    case Side::Less:
      return std_normal_cdf(-upper_normal_quantile(alpha) - shift);
  }
  throw std::logic_error("unknown side");
}

double asymptotic_power(double nu0, double tau3, const TParams& p, Side side, double alpha) {
  return asymptotic_power_from_info(efficient_info({p.mu, p.sigma, nu0}), tau3, side, alpha);
}

TestReport specified_scatter_test(const Sample& data, double nu0, const Matrix& sigma_known, double alpha, Side side,
                                  NuisanceMethod location_method) {
  const NuisanceFit fit = fit_nuisance(data, location_method);
  const TParams p{fit.location(), sigma_known, nu0};
  const CentralSequence cs = central_sequence(data, p);
  const double q = cs.delta3 / std::sqrt(gamma33(nu0, p.dim()));
  return make_normal_report(q, nu0, side, alpha, std::string(method_name(location_method)) + "+known_scatter",
                            data.rows());
}

double efficiency_loss(double nu0, double tau3, const TParams& p) {
  const FisherInfo info = fisher_info({p.mu, p.sigma, nu0});
  return tau3 * (std::sqrt(info.g33) - std::sqrt(info.g33_star));
}

ConfidenceInterval confidence_interval(const Sample& data, const IntervalOptions& options) {
  if (!(options.level > 0.0 && options.level < 1.0)) {
    throw std::invalid_argument("confidence_interval: level must lie in (0, 1)");
  }
  if (!(options.lower > 0.0 && options.upper > options.lower)) {
    throw std::invalid_argument("confidence_interval: invalid bracket");
  }
  if (options.grid_points < 2) throw std::invalid_argument("confidence_interval: need >= 2 grid points");

  ConfidenceInterval ci;
  ci.level = options.level;
  ci.method = options.method;
  // The moment-based scatter only exists for nu0 > 2.
  ci.bracket_lo = options.method == NuisanceMethod::MeCov ? std::max(options.lower, 2.001) : options.lower;
  ci.bracket_hi = options.upper;
  if (!(ci.bracket_hi > ci.bracket_lo)) throw std::invalid_argument("confidence_interval: empty bracket");

  const NuisanceFit fit = fit_nuisance(data, options.method, options.mcd);
  const std::function<double(double)> q_at = [&](double nu0) { return q_statistic(data, fit.at(nu0)).q; };
  const double z = upper_normal_quantile((1.0 - options.level) / 2.0);

  // Log-spaced scan; Q is expected to decrease in nu0.
  const int g = options.grid_points;
  std::vector<double> grid(static_cast<std::size_t>(g));
  std::vector<double> qs(static_cast<std::size_t>(g));
  const double log_lo = std::log(ci.bracket_lo);
  const double log_hi = std::log(ci.bracket_hi);
  for (int i = 0; i < g; ++i) {
    grid[static_cast<std::size_t>(i)] =
        i == g - 1 ? ci.bracket_hi : std::exp(log_lo + (log_hi - log_lo) * i / (g - 1));
    qs[static_cast<std::size_t>(i)] = q_at(grid[static_cast<std::size_t>(i)]);
  }
  for (int i = 1; i < g; ++i) {
    if (qs[static_cast<std::size_t>(i)] > qs[static_cast<std::size_t>(i - 1)]) ci.monotone = false;
  }

  // The interval is the connected acceptance region around the first
  // downward zero crossing of Q. Far from the truth a plug-in scatter can
  // make Q turn back (mecov as nu0 approaches 2), and those spurious
  // acceptance regions are not part of the interval.
  const auto q = [&](int i) { return qs[static_cast<std::size_t>(i)]; };
  const auto at = [&](int i) { return grid[static_cast<std::size_t>(i)]; };
  int above = -1;  // last grid index with Q > 0 before the crossing
  for (int i = 0; i + 1 < g; ++i) {
    if (q(i) > 0.0 && q(i + 1) <= 0.0) {
      above = i;
      ci.nu_at_zero = bisect_crossing(q_at, 0.0, at(i), at(i + 1), options.tolerance);
      break;
    }
  }
  int left = above;
  int right = above + 1;
  if (above < 0) {
    // No crossing inside the bracket: the root lies beyond one of its ends.
    const bool root_above = q(g - 1) > 0.0;
    left = root_above ? g - 1 : -1;
    right = root_above ? g : 0;
    if ((root_above && q(g - 1) > z) || (!root_above && q(0) < -z)) {
      ci.empty = true;
      return ci;
    }
  }
  while (left >= 0 && q(left) <= z) --left;
  while (right < g && q(right) >= -z) ++right;
  if (left < 0) {
    ci.lo = ci.bracket_lo;
    ci.lower_open = true;
  } else {
    ci.lo = bisect_crossing(q_at, z, at(left), at(left + 1), options.tolerance);
  }
  if (right >= g) {
    ci.hi = ci.bracket_hi;
    ci.upper_open = true;
  } else {
    ci.hi = bisect_crossing(q_at, -z, at(right - 1), at(right), options.tolerance);
  }
  return ci;
}

OneStepEstimate one_step_estimator(const Sample& data, NuisanceMethod method, std::optional<double> prelim,
                                   const McdOptions& mcd) {
  OneStepEstimate out;
  out.method = method;
  out.n = data.rows();
  if (prelim) {
    if (!(*prelim > 0.0)) throw std::domain_error("one_step_estimator: preliminary nu must be positive");
    out.nu_prelim = *prelim;
    out.prelim_supplied = true;
    out.prelim_clamped = *prelim <= kMomentNuMin || *prelim >= kMomentNuMax;
  } else {
    const MomentEstimate moment = moment_estimator_nu(data);
    out.nu_prelim = moment.nu;
    out.prelim_clamped = moment.clamped;
  }
  const NuisanceEstimate nuisance = estimate_nuisance(data, out.nu_prelim, method, mcd);
  const EfficientScore eff(nuisance.params());
  const double n = static_cast<double>(data.rows());
  out.delta3_star = eff.central_sequence(data);
  out.info_used = eff.info();
  out.nu_cam = out.nu_prelim + out.delta3_star / (std::sqrt(n) * out.info_used);
  out.se = 1.0 / std::sqrt(n * out.info_used);
  return out;
}

}  // namespace tailtest
