#include "tailtest/score_information.hpp"

#include "tailtest/special_functions.hpp"

#include <cmath>
#include <stdexcept>

namespace tailtest {

Vector ScoreVector::stacked() const {
  Vector out(mu_part.size() + sigma_part.size() + 1);
  out << mu_part, sigma_part, nu_part;
  return out;
}

Matrix FisherInfo::assembled() const {
  const Index k = g11.rows();
  const Index q = g22.rows();
  Matrix out = Matrix::Zero(k + q + 1, k + q + 1);
  out.topLeftCorner(k, k) = g11;
  out.block(k, k, q, q) = g22;
  out.block(k, k + q, q, 1) = g23;
  out.block(k + q, k, 1, q) = g23.transpose();
  out(k + q, k + q) = g33;
  return out;
}

double gamma33(double nu, Index k) {
  if (!(nu > 0.0)) throw std::domain_error("gamma33: nu must be positive");
  if (k < 1) throw std::invalid_argument("gamma33: k must be >= 1");
  const double kd = static_cast<double>(k);
  return -0.5 * (0.5 * trigamma(0.5 * (nu + kd)) - 0.5 * trigamma(0.5 * nu) + kd / (nu * (nu + kd)) -
                 1.0 / (nu + kd) + (nu + 2.0) / (nu * (nu + kd + 2.0)));
}

ScoreEvaluator::ScoreEvaluator(const TParams& p)
    : density_(p), dlog_c_(dlog_norm_const_dnu(p.nu, p.dim())) {
  const Index k = p.dim();
  sigma_map_ = 0.5 * duplication_matrix(k) * kron(density_.inv_root(), density_.inv_root());
}

ScoreVector ScoreEvaluator::operator()(const Eigen::Ref<const Vector>& x) const {
  const TParams& p = density_.params();
  const double nu = p.nu;
  const Index k = p.dim();
  const double kd = static_cast<double>(k);

  const Vector u = density_.standardize(x);
  const double d2 = u.squaredNorm();
  const double w = (1.0 + kd / nu) / (1.0 + d2 / nu);

  ScoreVector s;
  s.mu_part = w * (density_.inv_root() * u);
  const Matrix core = w * u * u.transpose() - Matrix::Identity(k, k);
  s.sigma_part = sigma_map_ * vec(core);
  s.nu_part = dlog_c_ - 0.5 * std::log1p(d2 / nu) + (nu + kd) / (2.0 * nu * nu) * d2 / (1.0 + d2 / nu);
  return s;
}

ScoreEvaluator::Sums ScoreEvaluator::sum_over(const Sample& data) const {
  const TParams& p = density_.params();
  const double nu = p.nu;
  const Index k = p.dim();
  const double kd = static_cast<double>(k);
  if (data.cols() != k) {
    throw std::invalid_argument("sample dimension does not match parameters");
  }

  // The Sigma-score is linear in w u u', so sum that first and map once.
  Vector u_weighted = Vector::Zero(k);
  Matrix outer = Matrix::Zero(k, k);
  double nu_sum = 0.0;
  const Matrix& inv_root = density_.inv_root();
  Vector u(k);
  for (Index i = 0; i < data.rows(); ++i) {
    u.noalias() = inv_root * (data.row(i).transpose() - p.mu);
    const double d2 = u.squaredNorm();
    const double w = (1.0 + kd / nu) / (1.0 + d2 / nu);
    u_weighted.noalias() += w * u;
    outer.selfadjointView<Eigen::Lower>().rankUpdate(u, w);
    nu_sum += -0.5 * std::log1p(d2 / nu) + (nu + kd) / (2.0 * nu * nu) * d2 / (1.0 + d2 / nu);
  }
  const auto n = static_cast<double>(data.rows());
  outer = outer.selfadjointView<Eigen::Lower>();
  outer.diagonal().array() -= n;

  Sums sums;
  sums.n = data.rows();
  sums.mu = inv_root * u_weighted;
  sums.sigma = sigma_map_ * vec(outer);
  sums.nu = nu_sum + n * dlog_c_;
  return sums;
}

ScoreVector score(const Vector& x, const TParams& p) {
  return ScoreEvaluator(p)(x);
}

FisherInfo fisher_info(const TParams& p) {
  p.validate();
  const Index k = p.dim();
  const double kd = static_cast<double>(k);
  const double nu = p.nu;
  const SymRoot root = sym_sqrt(p.sigma);

  const Matrix pk = duplication_matrix(k);
  const Matrix half_kron = kron(root.inv_root, root.inv_root);  // (Sigma^{(x)2})^{-1/2}
  const Matrix identity = Matrix::Identity(k * k, k * k);
  const Matrix kk = commutation_matrix(k);
  const Matrix jk = j_matrix(k);
  const double ratio = (nu + kd) / (nu + kd + 2.0);

  FisherInfo info;
  info.g11 = ratio * root.inv_root * root.inv_root;
  info.g22 = 0.25 * pk * half_kron * (ratio * (identity + kk + jk) - jk) * half_kron * pk.transpose();
  info.g22 = symmetrize(info.g22);
  info.g23 = (-1.0 / ((nu + kd + 2.0) * (nu + kd))) * pk * half_kron * vec(Matrix::Identity(k, k));
  info.g33 = gamma33(nu, k);
  const Vector projected = spd_solve(info.g22, info.g23);
  info.g33_star = info.g33 - info.g23.dot(projected);
  if (!(info.g33_star > 0.0)) {
    throw std::domain_error("fisher_info: efficient information is not positive");
  }
  return info;
}

double efficient_info(const TParams& p) {
  return fisher_info(p).g33_star;
}

double univariate_efficient_info(double nu) {
  if (!(nu > 0.0)) throw std::domain_error("univariate_efficient_info: nu must be positive");
  return -0.5 * (0.5 * trigamma(0.5 * (nu + 1.0)) - 0.5 * trigamma(0.5 * nu) + (nu + 3.0) / (nu * (nu + 1.0) * (nu + 1.0)));
}

double univariate_efficient_score(double x, double mu, double sigma, double nu) {
  if (!(sigma > 0.0)) throw std::domain_error("univariate_efficient_score: sigma must be positive");
  if (!(nu > 0.0)) throw std::domain_error("univariate_efficient_score: nu must be positive");
  const double z = (x - mu) / sigma;
  const double z2 = z * z;
  return (nu + 3.0) / (2.0 * nu * nu) * z2 / (1.0 + z2 / nu) - 0.5 * std::log1p(z2 / nu) +
         dlog_norm_const_dnu(nu, 1) - 1.0 / (nu * (nu + 1.0));
}

}  // namespace tailtest
