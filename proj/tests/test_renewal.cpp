#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "seqlab/errors.hpp"
#include "seqlab/renewal.hpp"
#include "seqlab/rng.hpp"

using namespace seqlab;
using namespace seqlab::renewal;

namespace {

auto vector_stream(const std::vector<double>& xs) {
  return [&xs, k = std::size_t{0}]() mutable -> std::optional<double> {
    if (k == xs.size()) return std::nullopt;
    return xs[k++];
  };
}

std::vector<double> gaussian_walk(std::uint64_t seed, std::size_t n, double mean) {
  Rng rng(seed, 0, 0);
  std::vector<double> xs(n);
  for (double& x : xs) x = rng.normal(mean, 1.0);
  return xs;
}

}  // namespace

TEST(CrossLinear, Trace) {
  const std::vector<double> xs{0.5, 0.4, 0.9};
  const Crossing c = cross_linear(vector_stream(xs), 1.0, 0.1, 100);
  EXPECT_EQ(c.tau, 3u);
  EXPECT_NEAR(c.s_tau, 1.8, 1e-12);
  EXPECT_NEAR(c.overshoot, 0.5, 1e-12);
  EXPECT_NEAR(c.boundary_value, 1.3, 1e-12);
  EXPECT_FALSE(c.truncated);
  const std::vector<double> flat{0.1, 0.1};
  const Crossing t = cross_linear(vector_stream(flat), 1.0, 0.0, 100);
  EXPECT_TRUE(t.truncated);
  EXPECT_EQ(t.tau, 2u);
  EXPECT_EQ(t.overshoot, 0.0);
}

TEST(CrossLinear, StrictInequality) {
  const std::vector<double> xs{1.0, 0.5};
  EXPECT_EQ(cross_linear(vector_stream(xs), 1.0, 0.0, 10).tau, 2u);
}

TEST(CrossPower, Trace) {
  const std::vector<double> xs{1.0, 0.5};
  const Crossing c = cross_power(vector_stream(xs), 1.0, 0.5, 10);
  EXPECT_EQ(c.tau, 2u);
  EXPECT_NEAR(c.overshoot, 1.5 - std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(c.boundary_value, std::sqrt(2.0), 1e-12);
}

TEST(CrossPower, ZeroExponentIsLinearBoundary) {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const auto xs = gaussian_walk(seed, 5000, 0.3);
    const Crossing p = cross_power(vector_stream(xs), 7.0, 0.0, 5000);
    const Crossing l = cross_linear(vector_stream(xs), 7.0, 0.0, 5000);
    EXPECT_EQ(p.tau, l.tau);
    EXPECT_EQ(p.overshoot, l.overshoot);
    EXPECT_EQ(p.truncated, l.truncated);
  }
}

TEST(CrossGeneral, ZeroPerturbationIsLinearBoundary) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const auto xs = gaussian_walk(seed, 2000, 0.5);
    std::size_t k = 0;
    const Crossing g = cross_general(
        [&]() -> std::optional<JointIncrement> {
          if (k == xs.size()) return std::nullopt;
          return JointIncrement{xs[k++], {}};
        },
        Perturbation::zero, nullptr, 5.0, 2000);
    const Crossing l = cross_linear(vector_stream(xs), 5.0, 0.0, 2000);
    EXPECT_EQ(g.tau, l.tau);
    EXPECT_EQ(g.overshoot, l.overshoot);
  }
}

TEST(CrossGeneral, MinPerturbationTrace) {
  // H = min(W1 + n eps, W2 + n eps) with eps = 0.1.
  const std::vector<JointIncrement> zs{{1.0, {0.5, -0.2}}, {1.0, {0.1, 0.3}}, {1.0, {0.0, 0.0}}};
  std::size_t k = 0;
  const Crossing c = cross_general(
      [&]() -> std::optional<JointIncrement> {
        if (k == zs.size()) return std::nullopt;
        return zs[k++];
      },
      Perturbation::min, [](std::size_t) { return 0.1; }, 1.5, 10);
  // n=1: bound 1.5 + min(0.6, -0.1) = 1.4, S=1. n=2: bound 1.5 + min(0.8, 0.3) = 1.8, S=2.
  EXPECT_EQ(c.tau, 2u);
  EXPECT_NEAR(c.boundary_value, 1.8, 1e-12);
  EXPECT_NEAR(c.overshoot, 0.2, 1e-12);
  ASSERT_EQ(c.w_tau.size(), 2u);
  EXPECT_NEAR(c.w_tau[0], 0.6, 1e-12);
  EXPECT_NEAR(c.w_tau[1], 0.1, 1e-12);
}

TEST(Crossings, OvershootIsNonnegative) {
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    const auto xs = gaussian_walk(seed, 3000, 0.2);
    const Crossing l = cross_linear(vector_stream(xs), 4.0, 0.05, 3000);
    const Crossing p = cross_power(vector_stream(xs), 2.0, 0.6, 3000);
    EXPECT_GE(l.overshoot, 0.0);
    EXPECT_GE(p.overshoot, 0.0);
    if (!l.truncated) EXPECT_GT(l.s_tau - static_cast<double>(l.tau) * 0.05, 4.0);
  }
}

TEST(Renewal, ExponentialOvershootIsMemoryless) {
  // Exp(1) increments: every overshoot is Exp(1), so r(0) = E[R^2] / 2E[R] = 1.
  SimOptions so;
  so.reps = 20000;
  so.seed = 3;
  const RenewalEstimate e = estimate_rho(exponential_sampler(1.0), 0.0, so);
  EXPECT_NEAR(e.rho_plus.value, 1.0, 3.0 * e.rho_plus.std_error);
  EXPECT_NEAR(e.mean_overshoot.value, 1.0, 3.0 * e.mean_overshoot.std_error);
  EXPECT_NEAR(e.mean_sq_overshoot.value, 2.0, 3.0 * e.mean_sq_overshoot.std_error);
  EXPECT_EQ(e.truncated, 0u);
}

TEST(Renewal, WaldIdentity) {
  // E[S_tau] = mu E[tau].
  SimOptions so;
  so.reps = 20000;
  so.seed = 4;
  const double mu = 0.8;
  const PassageSummary s = simulate_linear(gaussian_sampler(mu), 10.0, 0.0, so);
  EXPECT_NEAR(s.s_tau.value, mu * s.tau.value, 3.0 * (s.s_tau.std_error + mu * s.tau.std_error));
  EXPECT_NEAR(s.s_tau.value, 10.0 + s.overshoot.value, 1e-9);
}

TEST(Renewal, DeterministicAcrossWorkers) {
  SimOptions so;
  so.reps = 500;
  so.seed = 9;
  const auto a = estimate_rho(gaussian_sampler(1.0), 0.0, so);
  so.workers = 3;
  const auto b = estimate_rho(gaussian_sampler(1.0), 0.0, so);
  EXPECT_EQ(a.rho_plus.value, b.rho_plus.value);
  EXPECT_EQ(a.rho_plus.std_error, b.rho_plus.std_error);
}

TEST(WeightedFit, ExactLineAndClosedFormWls) {
  const std::vector<double> x{1.0, 2.0, 3.0, 4.0};
  std::vector<double> y;
  for (double v : x) y.push_back(2.0 + 3.0 * v);
  const std::vector<double> se{0.1, 0.2, 0.1, 0.3};
  const LinearFit f = weighted_fit(x, y, se);
  EXPECT_NEAR(f.slope, 3.0, 1e-12);
  EXPECT_NEAR(f.intercept, 2.0, 1e-12);

  const std::vector<double> yn{2.1, 4.9, 8.2, 10.7};
  const LinearFit g = weighted_fit(x, yn, se);
  double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double w = 1.0 / (se[i] * se[i]);
    sw += w;
    sx += w * x[i];
    sy += w * yn[i];
    sxx += w * x[i] * x[i];
    sxy += w * x[i] * yn[i];
  }
  const double det = sw * sxx - sx * sx;
  EXPECT_NEAR(g.slope, (sw * sxy - sx * sy) / det, 1e-10);
  EXPECT_NEAR(g.intercept, (sxx * sy - sx * sxy) / det, 1e-10);
  EXPECT_NEAR(g.slope_se, std::sqrt(sw / det), 1e-10);
  EXPECT_NEAR(g.intercept_se, std::sqrt(sxx / det), 1e-10);
}

TEST(FitC0, RecoversSyntheticConstants) {
  const double mu = 2.0;
  const std::vector<double> b{25.0, 50.0, 100.0, 200.0};
  std::vector<double> tau;
  for (double v : b) tau.push_back((v + 1.5 * std::sqrt(v) + 0.8) / mu);
  const std::vector<double> se(b.size(), 0.01);
  const LinearFit f = fit_c0(b, tau, se, mu);
  EXPECT_NEAR(f.slope, 1.5, 1e-9);
  EXPECT_NEAR(f.intercept, 0.8, 1e-9);
  EXPECT_NEAR(corrected_expectation(100.0, mu, 0.8, 1.5), (100.0 + 15.0 + 0.8) / 2.0, 1e-12);
  EXPECT_NEAR(corrected_expectation(100.0, mu, 0.8), 50.4, 1e-12);
}

TEST(Renewal, Errors) {
  const std::vector<double> xs{1.0};
  EXPECT_THROW(cross_linear(vector_stream(xs), -1.0, 0.0, 10), ConfigError);
  EXPECT_THROW(cross_power(vector_stream(xs), 1.0, 1.0, 10), ConfigError);
  EXPECT_THROW(cross_power(vector_stream(xs), 0.0, 0.5, 10), ConfigError);
  const std::vector<double> bad{std::nan("")};
  EXPECT_THROW(cross_linear(vector_stream(bad), 1.0, 0.0, 10), DataError);
}
