#pragma once

#include "tailtest/matrix_kit.hpp"
#include "tailtest/random.hpp"
#include "tailtest/student_model.hpp"

#include <random>

namespace testsupport {

using tailtest::Index;
using tailtest::Matrix;
using tailtest::Vector;

inline Matrix random_spd(Index k, tailtest::Rng& rng, double ridge = 0.5) {
  std::normal_distribution<double> z;
  Matrix a(k, k);
  for (Index i = 0; i < k; ++i)
    for (Index j = 0; j < k; ++j) a(i, j) = z(rng);
  Matrix s = a * a.transpose() / static_cast<double>(k) + ridge * Matrix::Identity(k, k);
  return tailtest::symmetrize(s);
}

inline Vector random_vector(Index k, tailtest::Rng& rng, double scale = 1.0) {
  std::normal_distribution<double> z(0.0, scale);
  Vector v(k);
  for (Index i = 0; i < k; ++i) v(i) = z(rng);
  return v;
}

inline tailtest::TParams random_params(Index k, tailtest::Rng& rng) {
  std::uniform_real_distribution<double> u(1.5, 15.0);
  return {random_vector(k, rng), random_spd(k, rng), u(rng)};
}

/// Central difference of a scalar function of one variable.
template <class F>
double central_difference(F&& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

/// Composite Simpson rule on [a, b] with an even number of panels.
template <class F>
double simpson(F&& f, double a, double b, int panels) {
  if (panels % 2) ++panels;
  const double h = (b - a) / panels;
  double s = f(a) + f(b);
  for (int i = 1; i < panels; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

/// Integral over (0, inf) via x = exp(s); suits integrands with power-law tails.
template <class F>
double integrate_half_line(F&& f, int panels = 20000, double s_lo = -60.0, double s_hi = 60.0) {
  return simpson(
      [&](double s) {
        const double x = std::exp(s);
        return f(x) * x;
      },
      s_lo, s_hi, panels);
}

/// Integral over the real line, split at `center`.
template <class F>
double integrate_line(F&& f, int panels = 20000, double center = 0.0) {
  return integrate_half_line([&](double x) { return f(center + x); }, panels) +
         integrate_half_line([&](double x) { return f(center - x); }, panels);
}

}  // namespace testsupport
