#pragma once

// Schwarz's GLR test with constant boundary |log c| and Lai's GLR test with
// the time-varying boundary g(cn), for one-parameter exponential families.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>

#include "seqlab/binary_tests.hpp"
#include "seqlab/expfam.hpp"

namespace seqlab::glr {

struct GlrConfig {
  expfam::Family family = expfam::Family::gaussian();
  double theta0 = 0.0;
  // theta1 == theta0 selects the one-sided test without indifference zone.
  double theta1 = 1.0;
  double c = 1e-3;
  double xi = 0.0;
  std::size_t max_n = 1000000;
};

// Throws ConfigError (or DomainError) unless the config is usable.
void validate(const GlrConfig& config);

// Root of I(theta, theta0) = I(theta, theta1) on (theta0, theta1).
double theta_star(const expfam::Family& family, double theta0, double theta1);

// g(t) = |log t| + xi log|log t| (clamped as documented); 0 for t >= 1.
double boundary_g(double t, double xi);

// n * max[I(theta_hat, theta0), I(theta_hat, theta1)].
double glr_statistic(const GlrConfig& config, double theta_hat, std::size_t n);

namespace detail {

template <class Stream, class Boundary>
Verdict run_glr(const GlrConfig& config, Stream&& next, Boundary&& boundary) {
  validate(config);
  const bool one_sided = config.theta0 == config.theta1;
  const double tstar = one_sided ? config.theta0
                                 : theta_star(config.family, config.theta0, config.theta1);
  // Accept H0 iff theta_hat < theta*; the one-sided test accepts on a tie.
  auto decide = [&](double th) {
    if (one_sided) return th > tstar ? 1 : 0;
    return th < tstar ? 0 : 1;
  };
  double sum = 0.0;
  double th = config.theta0;
  double stat = 0.0;
  std::size_t n = 0;
  while (n < config.max_n) {
    std::optional<double> x = next();
    if (!x) break;
    if (!std::isfinite(*x)) throw DataError("non-finite observation");
    sum += *x;
    ++n;
    th = expfam::mle(config.family, sum, n);
    stat = glr_statistic(config, th, n);
    const double g = boundary(n);
    if (stat >= g) return {n, decide(th), stat, stat - g, false};
  }
  return {n, n > 0 ? decide(th) : 0, stat, 0.0, true};
}

}  // namespace detail

template <class Stream>
Verdict schwarz_test(const GlrConfig& config, Stream&& next) {
  if (!(config.theta0 < config.theta1)) throw ConfigError("schwarz test requires theta0 < theta1");
  const double g = std::abs(std::log(config.c));
  return detail::run_glr(config, next, [g](std::size_t) { return g; });
}

template <class Stream>
Verdict lai_test(const GlrConfig& config, Stream&& next) {
  const double c = config.c;
  const double xi = config.xi;
  return detail::run_glr(config, next, [c, xi](std::size_t n) {
    return boundary_g(c * static_cast<double>(n), xi);
  });
}

inline auto span_stream(std::span<const double> xs) {
  return [xs, k = std::size_t{0}]() mutable -> std::optional<double> {
    if (k == xs.size()) return std::nullopt;
    return xs[k++];
  };
}

}  // namespace seqlab::glr
