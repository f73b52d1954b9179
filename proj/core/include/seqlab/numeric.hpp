#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

namespace seqlab {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline double log_sum_exp(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

inline double log_sum_exp(std::span<const double> xs) {
  double hi = -kInf;
  for (double x : xs) hi = std::max(hi, x);
  if (hi == -kInf || hi == kInf) return hi;
  double acc = 0.0;
  for (double x : xs) acc += std::exp(x - hi);
  return hi + std::log(acc);
}

// Bisection for a continuous f with a sign change on [lo, hi]. Returns the
// midpoint of the final bracket.
template <class F>
double bisect(F&& f, double lo, double hi, double tol = 1e-14, int max_iter = 300) {
  double flo = f(lo);
  for (int it = 0; it < max_iter && hi - lo > tol * std::max(1.0, std::abs(lo) + std::abs(hi));
       ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace seqlab
