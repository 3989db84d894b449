#pragma once

#include <algorithm>
#include <cmath>
#include <random>

#include "dln/matcore.hpp"

namespace testutil {

inline dln::Matrix gaussian(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& g, double sd = 1.0) {
  std::normal_distribution<double> n(0.0, sd);
  dln::Matrix a(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) a(i, j) = n(g);
  return a;
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

inline double rel_err(const dln::Matrix& a, const dln::Matrix& b) {
  const double s = std::max(a.norm(), b.norm());
  return s == 0.0 ? 0.0 : (a - b).norm() / s;
}

// Golden-section minimizer of f on [lo, hi].
template <typename F>
double golden_min(F f, double lo, double hi, int iters = 200) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  for (int k = 0; k < iters; ++k) {
    if (fc < fd) {
      b = d; d = c; fd = fc; c = b - r * (b - a); fc = f(c);
    } else {
      a = c; c = d; fc = fd; d = a + r * (b - a); fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace testutil
