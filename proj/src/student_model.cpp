#include "tailtest/student_model.hpp"

#include "tailtest/special_functions.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace tailtest {

namespace {

void require_nu(double nu) {
  if (!(nu > 0.0) || !std::isfinite(nu)) {
    throw std::domain_error("tail weight nu must be positive and finite");
  }
}

}  // namespace

void TParams::validate() const {
  require_nu(nu);
  if (mu.size() == 0 || sigma.rows() != mu.size() || sigma.cols() != mu.size()) {
    throw std::invalid_argument("TParams: mu and sigma dimensions disagree");
  }
  if (!mu.allFinite()) {
    throw std::invalid_argument("TParams: non-finite location");
  }
  if (!is_symmetric(sigma)) {
    throw std::invalid_argument("TParams: scatter is not symmetric");
  }
  (void)sym_sqrt(sigma);  // throws if not SPD
}

double log_norm_const(double nu, Index k) {
  require_nu(nu);
  if (k < 1) throw std::invalid_argument("log_norm_const: k must be >= 1");
  const double kd = static_cast<double>(k);
  return log_gamma(0.5 * (nu + kd)) - log_gamma(0.5 * nu) - 0.5 * kd * std::log(std::numbers::pi * nu);
}

double dlog_norm_const_dnu(double nu, Index k) {
  require_nu(nu);
  if (k < 1) throw std::invalid_argument("dlog_norm_const_dnu: k must be >= 1");
  const double kd = static_cast<double>(k);
  return 0.5 * digamma(0.5 * (nu + kd)) - 0.5 * digamma(0.5 * nu) - 0.5 * kd / nu;
}

StudentDensity::StudentDensity(TParams params) : params_(std::move(params)) {
  params_.validate();
  params_.sigma = symmetrize(params_.sigma);
  root_ = sym_sqrt(params_.sigma);
  log_c_ = log_norm_const(params_.nu, params_.dim());
}

Vector StudentDensity::standardize(const Eigen::Ref<const Vector>& x) const {
  if (x.size() != params_.dim()) {
    throw std::invalid_argument("observation dimension does not match parameters");
  }
  return root_.inv_root * (x - params_.mu);
}

double StudentDensity::mahalanobis_sq(const Eigen::Ref<const Vector>& x) const {
  return standardize(x).squaredNorm();
}

double StudentDensity::log_density(const Eigen::Ref<const Vector>& x) const {
  const double d2 = mahalanobis_sq(x);
  const double nu = params_.nu;
  const double k = static_cast<double>(params_.dim());
  return log_c_ - 0.5 * root_.log_det - 0.5 * (nu + k) * std::log1p(d2 / nu);
}

double mahalanobis_sq(const Vector& x, const TParams& p) {
  return StudentDensity(p).mahalanobis_sq(x);
}

double log_density(const Vector& x, const TParams& p) {
  return StudentDensity(p).log_density(x);
}

double log_likelihood(const Sample& data, const TParams& p) {
  const StudentDensity density(p);
  double total = 0.0;
  for (Index i = 0; i < data.rows(); ++i) {
    total += density.log_density(data.row(i).transpose());
  }
  return total;
}

Sample sample(const TParams& p, Index n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("sample: n must be >= 1");
  const StudentDensity density(p);
  const Index k = p.dim();
  std::normal_distribution<double> normal(0.0, 1.0);
  Sample out(n, k);
  Vector z(k);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < k; ++j) z(j) = normal(rng);
    const double w = chi_square_sample(p.nu, rng);
    out.row(i) = (p.mu + density.root() * z / std::sqrt(w / p.nu)).transpose();
  }
  return out;
}

Sample sample(const TParams& p, Index n, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  return sample(p, n, rng);
}

}  // namespace tailtest
