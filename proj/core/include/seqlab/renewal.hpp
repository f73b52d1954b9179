#pragma once

// First-passage simulation for random walks crossing linear, power and
// perturbed boundaries, with Monte Carlo estimates of overshoot constants.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "seqlab/errors.hpp"
#include "seqlab/expfam.hpp"
#include "seqlab/rng.hpp"

namespace seqlab::renewal {

struct Crossing {
  std::size_t tau = 0;
  double s_tau = 0.0;
  double overshoot = 0.0;
  double boundary_value = 0.0;
  bool truncated = false;
  // W_tau for cross_general.
  std::vector<double> w_tau;
};

// First n >= 1 with S_n - n u > c.
template <class Stream>
Crossing cross_linear(Stream&& next, double c, double u, std::size_t max_n) {
  if (!(c >= 0.0)) throw ConfigError("boundary offset c must be nonnegative");
  if (max_n < 1) throw ConfigError("max_n must be at least 1");
  double s = 0.0;
  std::size_t n = 0;
  while (n < max_n) {
    std::optional<double> x = next();
    if (!x) break;
    if (!std::isfinite(*x)) throw DataError("non-finite increment");
    s += *x;
    ++n;
    const double level = s - static_cast<double>(n) * u;
    if (level > c) return {n, s, level - c, c + static_cast<double>(n) * u, false, {}};
  }
  return {n, s, 0.0, c + static_cast<double>(n) * u, true, {}};
}

// First n >= 1 with S_n > lambda n^alpha.
template <class Stream>
Crossing cross_power(Stream&& next, double lambda, double alpha, std::size_t max_n) {
  if (!(lambda > 0.0)) throw ConfigError("lambda must be positive");
  if (!(alpha >= 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in [0, 1)");
  if (max_n < 1) throw ConfigError("max_n must be at least 1");
  double s = 0.0;
  std::size_t n = 0;
  while (n < max_n) {
    std::optional<double> x = next();
    if (!x) break;
    if (!std::isfinite(*x)) throw DataError("non-finite increment");
    s += *x;
    ++n;
    const double bound = alpha == 0.0 ? lambda : lambda * std::pow(static_cast<double>(n), alpha);
    if (s > bound) return {n, s, s - bound, bound, false, {}};
  }
  const double bound = lambda * std::pow(static_cast<double>(std::max<std::size_t>(n, 1)), alpha);
  return {n, s, 0.0, bound, true, {}};
}

enum class Perturbation { zero, min };

struct JointIncrement {
  double x;
  std::vector<double> y;
};

// First n >= 1 with S_n - H(W_n + n eps_n) > b, where W_n sums the Y
// vectors and H is 0 or the coordinate minimum. eps(n) supplies eps_n.
template <class Stream>
Crossing cross_general(Stream&& next, Perturbation h, const std::function<double(std::size_t)>& eps,
                       double b, std::size_t max_n) {
  if (max_n < 1) throw ConfigError("max_n must be at least 1");
  double s = 0.0;
  std::vector<double> w;
  std::size_t n = 0;
  double bound = b;
  while (n < max_n) {
    std::optional<JointIncrement> z = next();
    if (!z) break;
    if (!std::isfinite(z->x)) throw DataError("non-finite increment");
    if (h == Perturbation::min && z->y.empty()) throw ConfigError("H = min needs d >= 1");
    if (w.empty()) w.assign(z->y.size(), 0.0);
    if (z->y.size() != w.size()) throw DataError("perturbation dimension changed");
    s += z->x;
    ++n;
    for (std::size_t k = 0; k < w.size(); ++k) w[k] += z->y[k];
    double hv = 0.0;
    if (h == Perturbation::min) {
      const double shift = static_cast<double>(n) * (eps ? eps(n) : 0.0);
      hv = w[0] + shift;
      for (std::size_t k = 1; k < w.size(); ++k) hv = std::min(hv, w[k] + shift);
    }
    bound = b + hv;
    if (s > bound) return {n, s, s - bound, bound, false, w};
  }
  return {n, s, 0.0, bound, true, w};
}

using Sampler = std::function<double(Rng&)>;

Sampler gaussian_sampler(double mean, double sd = 1.0);
Sampler exponential_sampler(double rate);
Sampler family_sampler(const expfam::Family& family, double theta);

inline auto sampler_stream(const Sampler& sampler, Rng& rng) {
  return [&sampler, &rng]() -> std::optional<double> { return sampler(rng); };
}

// Jointly Gaussian (X, Y) with X = mu + Z0 and Y_k = rho Z0 + sqrt(1 - rho^2) Z_k.
std::function<JointIncrement(Rng&)> joint_gaussian_sampler(double mu, std::size_t d, double rho);

struct Estimate {
  double value;
  double std_error;
};

struct RenewalEstimate {
  Estimate rho_plus;
  Estimate mean_overshoot;
  Estimate mean_sq_overshoot;
  double r_u;
  std::size_t reps;
  std::size_t truncated;
};

struct SimOptions {
  std::size_t reps = 10000;
  std::uint64_t seed = 1;
  std::size_t workers = 1;
  std::size_t max_n = 10000000;
};

// Monte Carlo over ladder crossings tau(0, u): r(u) = E[R^2] / 2E[R] with a
// delta-method standard error. rho_plus is r(u) for i.i.d. increments.
RenewalEstimate estimate_rho(const Sampler& sampler, double u, const SimOptions& options);

struct PassageSummary {
  Estimate tau;
  Estimate s_tau;
  Estimate overshoot;
  std::size_t reps;
  std::size_t truncated;
};

// Moments of the linear crossing tau(c, u) over independent replications.
PassageSummary simulate_linear(const Sampler& sampler, double c, double u,
                               const SimOptions& options);

// (b + c0 sqrt(b) + rho_plus) / mu.
double corrected_expectation(double b, double mu, double rho_plus, double c0 = 0.0);

struct LinearFit {
  double intercept;
  double slope;
  double intercept_se;
  double slope_se;
};

// Weighted least squares of y on x with known standard errors; falls back to
// ordinary least squares with the residual variance when any se is zero.
LinearFit weighted_fit(std::span<const double> x, std::span<const double> y,
                       std::span<const double> se);

// Slope of mu E[tau_b] - b against sqrt(b) over the b grid. The intercept
// estimates rho_plus.
LinearFit fit_c0(std::span<const double> b, std::span<const double> mean_tau,
                 std::span<const double> tau_se, double mu);

}  // namespace seqlab::renewal
