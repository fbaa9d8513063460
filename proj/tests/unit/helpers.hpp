#pragma once

#include <cmath>
#include <vector>

#include "nld/fields.hpp"
#include "nld/solver.hpp"

namespace nld::test {

// Gaussian pulses exp(-x^2) and exp(-(x-1)^2).
inline DataSpec gaussian_pair() {
  return {DataFamily::gaussian, {1.0, 0.0, 1.0, 0.0}, {1.0, 1.0, 1.0, 0.0}};
}

// Bumps on [1.5, 4.5] (u) and [-4.5, -1.5] (v).
inline DataSpec separated_pair() {
  return {DataFamily::separated, {1.0, 3.0, 1.5, 0.0}, {1.0, -3.0, 1.5, 0.7}};
}

// Smallest window holding the cut-off Gaussians of gaussian_pair().
inline Grid gaussian_grid(double h, double T) { return Grid::for_run(-28.0, 29.0, h, T); }

inline double l2(const std::vector<Complex>& a, const std::vector<Complex>& b, double h) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += std::norm(a[j] - b[j]);
  return std::sqrt(h * s);
}

inline double max_abs_diff(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  double m = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a[j] - b[j]));
  return m;
}

// Composite Simpson rule on [a, b] with n (even) panels.
template <class F>
double simpson(F&& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int k = 1; k < n; ++k) s += (k % 2 ? 4.0 : 2.0) * f(a + k * h);
  return s * h / 3.0;
}

}  // namespace nld::test
