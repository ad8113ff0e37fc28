#include "tailtest/ml_baseline.hpp"

#include "tailtest/nuisance_estimation.hpp"
#include "tailtest/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tailtest {

namespace {

struct Factor {
  Eigen::LLT<Matrix> llt;
  double log_det = 0.0;
};

std::optional<Factor> factor(const Matrix& sigma) {
  Factor f{Eigen::LLT<Matrix>(sigma), 0.0};
  if (f.llt.info() != Eigen::Success) return std::nullopt;
  const Vector diag = Matrix(f.llt.matrixL()).diagonal();
  const double top = diag.maxCoeff();
  if (!(diag.minCoeff() > std::sqrt(kEigenvalueFloor) * top * 1e-2)) return std::nullopt;
  f.log_det = 2.0 * diag.array().log().sum();
  return f;
}

std::vector<double> distances(const Sample& data, const Vector& mu, const Factor& f) {
  const Matrix centered = (data.rowwise() - mu.transpose()).transpose();
  const Matrix solved = f.llt.matrixL().solve(centered);
  std::vector<double> out(static_cast<std::size_t>(data.rows()));
  for (Index i = 0; i < data.rows(); ++i) out[static_cast<std::size_t>(i)] = solved.col(i).squaredNorm();
  return out;
}

double loglik_from(const std::vector<double>& delta, Index k, double nu, double log_det) {
  double tail = 0.0;
  for (double d : delta) tail += std::log1p(d / nu);
  const double n = static_cast<double>(delta.size());
  return n * (log_norm_const(nu, k) - 0.5 * log_det) - 0.5 * (nu + static_cast<double>(k)) * tail;
}

double nu_score_derivative(const std::vector<double>& delta, Index k, double nu) {
  const double kd = static_cast<double>(k);
  const double n = static_cast<double>(delta.size());
  double sum = n * (0.25 * trigamma(0.5 * (nu + kd)) - 0.25 * trigamma(0.5 * nu) + 0.5 * kd / (nu * nu));
  for (double d : delta) {
    const double nd = nu + d;
    sum += 0.5 * d / (nu * nd);
    sum += 0.5 * d * (nu * nd - (nu + kd) * (2.0 * nu + d)) / (nu * nu * nd * nd);
  }
  return sum;
}

// Maximizer of the observed log-likelihood in nu at fixed (mu, Sigma).
double update_nu(const std::vector<double>& delta, Index k, double start) {
  double lo = kEmNuMin;
  double hi = kEmNuMax;
  if (nu_score_sum(delta, k, hi) > 0.0) return hi;
  if (nu_score_sum(delta, k, lo) < 0.0) return lo;
  double nu = std::clamp(start, lo, hi);
  for (int it = 0; it < 200; ++it) {
    const double g = nu_score_sum(delta, k, nu);
    if (g > 0.0) {
      lo = nu;
    } else {
      hi = nu;
    }
    const double dg = nu_score_derivative(delta, k, nu);
    double next = dg < 0.0 ? nu - g / dg : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::fabs(next - nu) <= 1e-12 * nu || hi - lo <= 1e-12 * nu) return next;
    nu = next;
  }
  return nu;
}

TParams default_init(const Sample& data, std::optional<double> nu_fixed) {
  const Vector mean = data.colwise().mean().transpose();
  const Matrix centered = data.rowwise() - mean.transpose();
  const Matrix s = centered.transpose() * centered / static_cast<double>(data.rows() - 1);
  const double nu = nu_fixed ? *nu_fixed : moment_estimator_nu(data).nu;
  const double shrink = nu > 2.0 ? (nu - 2.0) / nu : 1.0;
  return {mean, symmetrize(s * shrink), nu};
}

TParams diagonal_init(const Sample& data, double nu) {
  const Vector mean = data.colwise().mean().transpose();
  const Matrix centered = data.rowwise() - mean.transpose();
  Vector var = centered.colwise().squaredNorm().transpose() / static_cast<double>(data.rows());
  for (Index j = 0; j < var.size(); ++j) var(j) = std::max(var(j), 1e-8);
  return {mean, var.asDiagonal(), nu};
}

}  // namespace

double nu_score_sum(const std::vector<double>& delta, Index k, double nu) {
  const double kd = static_cast<double>(k);
  double sum = static_cast<double>(delta.size()) * dlog_norm_const_dnu(nu, k);
  for (double d : delta) {
    sum += -0.5 * std::log1p(d / nu) + (nu + kd) * d / (2.0 * nu * (nu + d));
  }
  return sum;
}

MlFit em_fit(const Sample& data, const EmOptions& options) {
  const Index n = data.rows();
  const Index k = data.cols();
  if (n <= k + 1) throw std::invalid_argument("em_fit: need more than k + 1 observations");
  if (options.nu_fixed && !(*options.nu_fixed > 0.0)) throw std::domain_error("em_fit: fixed nu must be positive");

  MlFit fit;
  fit.nu_fixed = options.nu_fixed;
  TParams p = options.init ? *options.init : default_init(data, options.nu_fixed);
  if (options.nu_fixed) {
    p.nu = *options.nu_fixed;
  } else {
    p.nu = std::clamp(p.nu, kEmNuMin, kEmNuMax);
  }

  std::optional<Factor> f = factor(p.sigma);
  if (!f) {
    p = diagonal_init(data, p.nu);
    f = factor(p.sigma);
    ++fit.restarts;
  }
  std::vector<double> delta = distances(data, p.mu, *f);
  double ll = loglik_from(delta, k, p.nu, f->log_det);
  fit.trace.push_back(ll);

  const double kd = static_cast<double>(k);
  for (int it = 1; it <= options.max_iter; ++it) {
    // E-step and M-step for (mu, Sigma) at the current nu.
    Vector weights(n);
    for (Index i = 0; i < n; ++i) weights(i) = (p.nu + kd) / (p.nu + delta[static_cast<std::size_t>(i)]);
    const Vector mu = (data.transpose() * weights) / weights.sum();
    const Matrix centered = data.rowwise() - mu.transpose();
    Matrix sigma = symmetrize(centered.transpose() * weights.asDiagonal() * centered / static_cast<double>(n));

    std::optional<Factor> next = factor(sigma);
    if (!next) {
      if (fit.restarts >= 3) {
        throw std::runtime_error("em_fit: scatter iterate stayed singular after restarts");
      }
      ++fit.restarts;
      p = diagonal_init(data, p.nu);
      f = factor(p.sigma);
      delta = distances(data, p.mu, *f);
      ll = loglik_from(delta, k, p.nu, f->log_det);
      fit.trace.push_back(ll);
      continue;
    }
    p.mu = mu;
    p.sigma = sigma;
    f = std::move(next);
    delta = distances(data, p.mu, *f);

    if (!options.nu_fixed) {
      const double candidate = update_nu(delta, k, p.nu);
      if (loglik_from(delta, k, candidate, f->log_det) >= loglik_from(delta, k, p.nu, f->log_det)) {
        p.nu = candidate;
      }
    }
    const double ll_next = loglik_from(delta, k, p.nu, f->log_det);
    fit.trace.push_back(ll_next);
    fit.iterations = it;
    const double change = ll_next - ll;
    ll = ll_next;
    if (std::fabs(change) < options.tol) {
      fit.converged = true;
      break;
    }
  }
  fit.params = p;
  fit.loglik = ll;
  return fit;
}

LrResult lr_test(const Sample& data, double nu0, double alpha) {
  if (!(nu0 > 0.0)) throw std::domain_error("lr_test: nu0 must be positive");
  LrResult out;

  EmOptions constrained;
  constrained.nu_fixed = nu0;
  out.constrained = em_fit(data, constrained);
  if (!out.constrained.converged) {
    throw std::runtime_error("lr_test: constrained fit did not converge in " +
                             std::to_string(out.constrained.iterations) + " iterations");
  }

  // Starts: moment-based nu, the null value, a heavy-tailed guess, and the
  // constrained optimum (which makes the free fit dominate by construction).
  const TParams moment_start = default_init(data, std::nullopt);
  TParams null_start = default_init(data, nu0);
  TParams heavy_start = default_init(data, 2.0);
  std::vector<TParams> inits{moment_start, null_start, heavy_start, out.constrained.params};

  std::optional<std::size_t> best;
  double nu_min = 0.0;
  double nu_max = 0.0;
  double ll_min = 0.0;
  double ll_max = 0.0;
  for (const TParams& init : inits) {
    EmOptions free;
    free.init = init;
    MlFit fit;
    try {
      fit = em_fit(data, free);
    } catch (const std::runtime_error&) {
      continue;
    }
    out.starts.push_back(fit);
    if (!fit.converged) continue;
    const std::size_t idx = out.starts.size() - 1;
    if (!best) {
      nu_min = nu_max = fit.params.nu;
      ll_min = ll_max = fit.loglik;
    }
    if (!best || fit.loglik > out.starts[*best].loglik) best = idx;
    nu_min = std::min(nu_min, fit.params.nu);
    nu_max = std::max(nu_max, fit.params.nu);
    ll_min = std::min(ll_min, fit.loglik);
    ll_max = std::max(ll_max, fit.loglik);
  }
  if (!best) throw std::runtime_error("lr_test: no free-nu start converged");
  out.free = out.starts[*best];
  out.start_nu_spread = nu_max - nu_min;
  out.start_loglik_spread = ll_max - ll_min;

  const double stat = std::max(0.0, 2.0 * (out.free.loglik - out.constrained.loglik));
  out.report.statistic = stat;
  out.report.side = Side::Two;
  out.report.alpha = alpha;
  out.report.p_value = 1.0 - chi_square_cdf(1.0, stat);
  out.report.reject = out.report.p_value < alpha;
  out.report.nu0 = nu0;
  out.report.estimator = "lr";
  out.report.n = data.rows();
  return out;
}

}  // namespace tailtest
