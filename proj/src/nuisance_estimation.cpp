#include "tailtest/nuisance_estimation.hpp"

#include "tailtest/random.hpp"
#include "tailtest/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace tailtest {

namespace {

void require_sample(const Sample& data, Index min_rows, const char* what) {
  if (data.cols() < 1 || data.rows() < min_rows) {
    throw std::invalid_argument(std::string(what) + ": need at least " + std::to_string(min_rows) +
                                " observations");
  }
  if (!data.allFinite()) {
    throw std::invalid_argument(std::string(what) + ": non-finite observations");
  }
}

double median_of(std::vector<double> values) {
  const std::size_t n = values.size();
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(values.begin(), mid, values.end());
  if (n % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(values.begin(), mid);
  return 0.5 * (lower + upper);
}

Vector column_mean(const Sample& data) {
  return data.colwise().mean().transpose();
}

Matrix covariance(const Sample& data, const Vector& center, double denominator) {
  const Matrix centered = data.rowwise() - center.transpose();
  return symmetrize(centered.transpose() * centered / denominator);
}

std::vector<double> squared_distances(const Sample& data, const Vector& center, const Matrix& scatter) {
  const Eigen::LLT<Matrix> llt(scatter);
  if (llt.info() != Eigen::Success) {
    throw std::domain_error("scatter is not positive definite");
  }
  const Matrix centered = (data.rowwise() - center.transpose()).transpose();
  const Matrix solved = llt.matrixL().solve(centered);
  std::vector<double> out(static_cast<std::size_t>(data.rows()));
  for (Index i = 0; i < data.rows(); ++i) out[static_cast<std::size_t>(i)] = solved.col(i).squaredNorm();
  return out;
}

// median of (X-mu)'Sigma^{-1}(X-mu) under t_{nu0} is k * F(k, nu0) median.
double f_median_scale(double nu0, Index k) {
  return static_cast<double>(k) * f_quantile(static_cast<double>(k), nu0, 0.5);
}

void require_nu0(double nu0) {
  if (!(nu0 > 0.0) || !std::isfinite(nu0)) {
    throw std::domain_error("nu0 must be positive and finite");
  }
}

NuisanceFit fit_mecov(const Sample& data) {
  require_sample(data, data.cols() + 1, "mecov");
  const Vector mean = column_mean(data);
  const Matrix s = covariance(data, mean, static_cast<double>(data.rows() - 1));
  (void)spd_log_det(s);  // singular S is an error
  return {NuisanceMethod::MeCov, mean, s, 0.0, 0, true};
}

NuisanceFit fit_med_mad(const Sample& data) {
  if (data.cols() != 1) throw std::invalid_argument("med_mad: univariate data required");
  require_sample(data, 2, "med_mad");
  std::vector<double> xs(data.data(), data.data() + data.rows());
  const double med = median_of(xs);
  for (double& x : xs) x = std::fabs(x - med);
  const double mad = median_of(xs);
  if (!(mad > 0.0)) throw std::domain_error("med_mad: median absolute deviation is zero");
  Vector loc(1);
  loc(0) = med;
  return {NuisanceMethod::MedMad, loc, Matrix::Constant(1, 1, mad * mad), 0.0, 0, true};
}

NuisanceFit fit_mot(const Sample& data) {
  require_sample(data, data.cols() + 1, "tyler_scatter");
  const SpatialMedian center = spatial_median(data);
  const TylerShape tyler = tyler_shape(data, center.location);
  const double med_d2 = median_of(squared_distances(data, center.location, tyler.shape));
  if (!(med_d2 > 0.0)) throw std::domain_error("tyler_scatter: degenerate scale");
  return {NuisanceMethod::MOT, center.location, tyler.shape, med_d2, center.iterations + tyler.iterations,
          center.converged};
}

struct Subset {
  Vector center;
  Matrix cov;
  double log_det = 0.0;
};

std::optional<Subset> subset_moments(const Sample& data, const std::vector<Index>& rows) {
  const Index k = data.cols();
  Subset s;
  s.center = Vector::Zero(k);
  for (Index r : rows) s.center += data.row(r).transpose();
  s.center /= static_cast<double>(rows.size());
  s.cov = Matrix::Zero(k, k);
  for (Index r : rows) {
    const Vector d = data.row(r).transpose() - s.center;
    s.cov.noalias() += d * d.transpose();
  }
  s.cov /= static_cast<double>(rows.size());
  try {
    s.log_det = spd_log_det(s.cov);
  } catch (const std::domain_error&) {
    return std::nullopt;
  }
  return s;
}

std::vector<Index> closest_rows(const Sample& data, const Subset& s, Index h) {
  const std::vector<double> d2 = squared_distances(data, s.center, s.cov);
  std::vector<Index> order(d2.size());
  std::iota(order.begin(), order.end(), Index{0});
  std::nth_element(order.begin(), order.begin() + h - 1, order.end(),
                   [&](Index a, Index b) { return d2[static_cast<std::size_t>(a)] < d2[static_cast<std::size_t>(b)]; });
  order.resize(static_cast<std::size_t>(h));
  std::sort(order.begin(), order.end());
  return order;
}

NuisanceFit fit_mcd(const Sample& data, const McdOptions& options) {
  const Index n = data.rows();
  const Index k = data.cols();
  require_sample(data, 2 * (k + 1), "mcd_lite");
  if (!(options.subset_fraction > 0.0 && options.subset_fraction <= 1.0)) {
    throw std::invalid_argument("mcd_lite: subset_fraction must lie in (0, 1]");
  }
  if (options.n_starts < 1) throw std::invalid_argument("mcd_lite: n_starts must be >= 1");
  const Index h = std::clamp(static_cast<Index>(std::llround(options.subset_fraction * static_cast<double>(n))),
                             (n + k + 1) / 2, n);

  Rng rng = make_rng(options.seed);
  std::optional<Subset> best;
  int total_steps = 0;
  bool all_fixed = true;
  std::vector<Index> pool(static_cast<std::size_t>(n));
  std::iota(pool.begin(), pool.end(), Index{0});

  for (int start = 0; start < options.n_starts; ++start) {
    std::vector<Index> rows;
    if (h == n) {
      rows = pool;
    } else {
      // Elemental start: k + 1 distinct rows by partial Fisher-Yates.
      for (Index j = 0; j <= k; ++j) {
        std::uniform_int_distribution<Index> pick(j, n - 1);
        std::swap(pool[static_cast<std::size_t>(j)], pool[static_cast<std::size_t>(pick(rng))]);
      }
      rows.assign(pool.begin(), pool.begin() + k + 1);
    }
    std::optional<Subset> current = subset_moments(data, rows);
    if (!current) continue;

    bool fixed = false;
    for (int step = 0; step < 100; ++step) {
      ++total_steps;
      std::vector<Index> next = closest_rows(data, *current, h);
      if (next == rows) {
        fixed = true;
        break;
      }
      std::optional<Subset> refined = subset_moments(data, next);
      if (!refined) break;
      // C-steps never increase the determinant; stop on a tie.
      const bool improved = refined->log_det < current->log_det - 1e-12;
      rows = std::move(next);
      current = std::move(refined);
      if (!improved) {
        fixed = true;
        break;
      }
    }
    all_fixed = all_fixed && fixed;
    if (!best || current->log_det < best->log_det) best = std::move(current);
    if (h == n) break;  // a single deterministic subset
  }
  if (!best) throw std::domain_error("mcd_lite: every elemental subset was degenerate");

  const double med_d2 = median_of(squared_distances(data, best->center, best->cov));
  return {NuisanceMethod::MCD, best->center, best->cov, med_d2, total_steps, all_fixed};
}

}  // namespace

std::string_view method_name(NuisanceMethod method) {
  switch (method) {
    case NuisanceMethod::MeCov:
      return "mecov";
    case NuisanceMethod::MedMad:
      return "medmad";
    case NuisanceMethod::MOT:
      return "mot";
    case NuisanceMethod::MCD:
      return "mcd";
  }
  return "unknown";
}

std::optional<NuisanceMethod> parse_method(std::string_view name) {
  for (auto m : {NuisanceMethod::MeCov, NuisanceMethod::MedMad, NuisanceMethod::MOT, NuisanceMethod::MCD}) {
    if (method_name(m) == name) return m;
  }
  return std::nullopt;
}

NuisanceFit::NuisanceFit(NuisanceMethod method, Vector location, Matrix shape, double scale_statistic,
                         int iterations, bool converged)
    : method_(method),
      location_(std::move(location)),
      shape_(std::move(shape)),
      scale_statistic_(scale_statistic),
      iterations_(iterations),
      converged_(converged) {}

double NuisanceFit::scale_factor(double nu0) const {
  require_nu0(nu0);
  switch (method_) {
    case NuisanceMethod::MeCov:
      if (!(nu0 > 2.0)) throw std::domain_error("mecov: nu0 must exceed 2 for a finite covariance");
      return 1.0 - 2.0 / nu0;
    case NuisanceMethod::MedMad: {
      const double q = abs_t_median(nu0);
      return 1.0 / (q * q);
    }
    case NuisanceMethod::MOT:
    case NuisanceMethod::MCD:
      return scale_statistic_ / f_median_scale(nu0, shape_.rows());
  }
  throw std::logic_error("unknown nuisance method");
}

NuisanceEstimate NuisanceFit::at(double nu0) const {
  NuisanceEstimate est;
  est.mu_hat = location_;
  est.sigma_hat = scale_factor(nu0) * shape_;
  est.method = method_;
  est.nu0 = nu0;
  est.iterations = iterations_;
  est.converged = converged_;
  return est;
}

NuisanceFit fit_nuisance(const Sample& data, NuisanceMethod method, const McdOptions& mcd) {
  switch (method) {
    case NuisanceMethod::MeCov:
      return fit_mecov(data);
    case NuisanceMethod::MedMad:
      return fit_med_mad(data);
    case NuisanceMethod::MOT:
      return fit_mot(data);
    case NuisanceMethod::MCD:
      return fit_mcd(data, mcd);
  }
  throw std::logic_error("unknown nuisance method");
}

NuisanceEstimate estimate_nuisance(const Sample& data, double nu0, NuisanceMethod method, const McdOptions& mcd) {
  require_nu0(nu0);
  if (method == NuisanceMethod::MeCov && !(nu0 > 2.0)) {
    throw std::domain_error("mecov: nu0 must exceed 2 for a finite covariance");
  }
  return fit_nuisance(data, method, mcd).at(nu0);
}

NuisanceEstimate mecov(const Sample& data, double nu0) {
  return estimate_nuisance(data, nu0, NuisanceMethod::MeCov);
}

NuisanceEstimate med_mad(const Sample& data, double nu0) {
  return estimate_nuisance(data, nu0, NuisanceMethod::MedMad);
}

NuisanceEstimate tyler_scatter(const Sample& data, double nu0) {
  return estimate_nuisance(data, nu0, NuisanceMethod::MOT);
}

NuisanceEstimate mcd_lite(const Sample& data, double nu0, const McdOptions& options) {
  return estimate_nuisance(data, nu0, NuisanceMethod::MCD, options);
}

double abs_t_median(double nu) {
  require_nu0(nu);
  // T^2 ~ F(1, nu).
  return std::sqrt(f_quantile(1.0, nu, 0.5));
}

SpatialMedian spatial_median(const Sample& data) {
  require_sample(data, 1, "spatial_median");
  const Index n = data.rows();
  const Index k = data.cols();
  SpatialMedian out;
  if (k == 1) {
    out.location = Vector::Constant(1, median_of(std::vector<double>(data.data(), data.data() + n)));
    return out;
  }

  Vector m(k);
  for (Index j = 0; j < k; ++j) {
    const Vector col = data.col(j);
    m(j) = median_of(std::vector<double>(col.data(), col.data() + n));
  }
  std::vector<double> dist(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) dist[static_cast<std::size_t>(i)] = (data.row(i).transpose() - m).norm();
  double scale = median_of(dist);
  if (!(scale > 0.0)) scale = std::max(1.0, data.cwiseAbs().maxCoeff());
  const double coincide = 1e-12 * scale;

  constexpr int kMaxIter = 500;
  out.converged = false;
  for (int it = 1; it <= kMaxIter; ++it) {
    // Vardi-Zhang modification: handles an iterate sitting on a data point.
    Vector weighted = Vector::Zero(k);
    Vector resultant = Vector::Zero(k);
    double weight_sum = 0.0;
    int ties = 0;
    for (Index i = 0; i < n; ++i) {
      const Vector diff = data.row(i).transpose() - m;
      const double d = diff.norm();
      if (d <= coincide) {
        ++ties;
        continue;
      }
      weighted += data.row(i).transpose() / d;
      resultant += diff / d;
      weight_sum += 1.0 / d;
    }
    if (weight_sum == 0.0) {
      out.converged = true;
      out.iterations = it;
      break;
    }
    const Vector t = weighted / weight_sum;
    Vector next = t;
    if (ties > 0) {
      const double r = resultant.norm();
      const double ratio = r > 0.0 ? static_cast<double>(ties) / r : 1.0;
      next = std::max(0.0, 1.0 - ratio) * t + std::min(1.0, ratio) * m;
    }
    const double step = (next - m).norm();
    m = next;
    out.iterations = it;
    if (step < 1e-10 * scale) {
      out.converged = true;
      break;
    }
  }
  out.location = m;
  return out;
}

TylerShape tyler_shape(const Sample& data, const Vector& center) {
  const Index k = data.cols();
  if (center.size() != k) throw std::invalid_argument("tyler_shape: center dimension mismatch");
  const Matrix centered = data.rowwise() - center.transpose();
  const double scale = std::max(centered.cwiseAbs().maxCoeff(), 1e-300);
  std::vector<Index> kept;
  for (Index i = 0; i < centered.rows(); ++i) {
    if (centered.row(i).norm() > 1e-12 * scale) kept.push_back(i);
  }
  if (static_cast<Index>(kept.size()) <= k) {
    throw std::domain_error("tyler_shape: too few observations away from the center");
  }
  const double kd = static_cast<double>(k);
  const double n_kept = static_cast<double>(kept.size());

  TylerShape out;
  Matrix v = Matrix::Identity(k, k);
  constexpr int kMaxIter = 1000;
  for (int it = 1; it <= kMaxIter; ++it) {
    const Eigen::LLT<Matrix> llt(v);
    if (llt.info() != Eigen::Success) throw std::domain_error("tyler_shape: shape lost definiteness");
    Matrix next = Matrix::Zero(k, k);
    for (Index i : kept) {
      const Vector z = centered.row(i).transpose();
      const double q = llt.matrixL().solve(z).squaredNorm();
      next.selfadjointView<Eigen::Lower>().rankUpdate(z, 1.0 / q);
    }
    next = Matrix(next.selfadjointView<Eigen::Lower>()) * (kd / n_kept);
    next *= kd / next.trace();
    const double change = (next - v).norm() / v.norm();
    v = next;
    out.iterations = it;
    if (change < 1e-9) {
      out.shape = symmetrize(v);
      return out;
    }
  }
  throw std::runtime_error("tyler_shape: no convergence after 1000 iterations");
}

double discretize(double value, Index n, double c0) {
  if (!(c0 > 0.0)) throw std::invalid_argument("discretize: c0 must be positive");
  if (n < 1) throw std::invalid_argument("discretize: n must be >= 1");
  if (value == 0.0) return 0.0;
  const double grid = c0 * std::sqrt(static_cast<double>(n));
  const double t = grid * std::fabs(value);
  // Values already on the grid (up to rounding) stay put.
  const double nearest = std::round(t);
  const double cell = std::fabs(t - nearest) <= 1e-9 * std::max(1.0, t) ? nearest : std::ceil(t);
  return std::copysign(cell / grid, value);
}

Matrix discretize(const Matrix& value, Index n, double c0) {
  return value.unaryExpr([&](double x) { return discretize(x, n, c0); });
}

double mardia_kurtosis(const Sample& data) {
  require_sample(data, data.cols() + 1, "mardia_kurtosis");
  const Vector mean = column_mean(data);
  const Matrix s = covariance(data, mean, static_cast<double>(data.rows()));
  const std::vector<double> d2 = squared_distances(data, mean, s);
  double total = 0.0;
  for (double d : d2) total += d * d;
  return total / static_cast<double>(data.rows());
}

MomentEstimate moment_nu_from_kurtosis(double kurtosis, Index k) {
  const double gaussian = static_cast<double>(k * (k + 2));
  MomentEstimate out;
  out.kurtosis = kurtosis;
  if (!(kurtosis > gaussian)) {
    out.nu = kMomentNuMax;
    out.clamped = true;
    return out;
  }
  const double nu = (4.0 * kurtosis - 2.0 * gaussian) / (kurtosis - gaussian);
  out.nu = std::clamp(nu, kMomentNuMin, kMomentNuMax);
  out.clamped = out.nu != nu;
  return out;
}

MomentEstimate moment_estimator_nu(const Sample& data) {
  return moment_nu_from_kurtosis(mardia_kurtosis(data), data.cols());
}

}  // namespace tailtest
