#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "seqlab/errors.hpp"
#include "seqlab/glr.hpp"
#include "seqlab/rng.hpp"

using namespace seqlab;
using namespace seqlab::glr;
using expfam::Family;

TEST(ThetaStar, GaussianSymmetry) {
  EXPECT_NEAR(theta_star(Family::gaussian(), 0.0, 1.0), 0.5, 1e-12);
  EXPECT_NEAR(theta_star(Family::gaussian(), -0.7, 0.7), 0.0, 1e-12);
  for (double shift : {-3.0, 0.25, 10.0}) {
    EXPECT_NEAR(theta_star(Family::gaussian(), 0.2 + shift, 1.4 + shift), 0.8 + shift, 1e-10);
  }
}

TEST(ThetaStar, PoissonMatchesGridScan) {
  const Family p = Family::poisson();
  const double t0 = 0.0;
  const double t1 = std::log(2.0);
  const double ts = theta_star(p, t0, t1);
  double best = t0;
  double best_gap = 1e300;
  const int steps = 2000000;
  for (int k = 1; k < steps; ++k) {
    const double t = t0 + (t1 - t0) * k / steps;
    const double gap = std::abs(expfam::kl(p, t, t0) - expfam::kl(p, t, t1));
    if (gap < best_gap) {
      best_gap = gap;
      best = t;
    }
  }
  EXPECT_NEAR(ts, best, 1e-6);
  EXPECT_LE(std::abs(expfam::kl(p, ts, t0) - expfam::kl(p, ts, t1)), 1e-10);
}

TEST(BoundaryG, Values) {
  EXPECT_NEAR(boundary_g(std::exp(-10.0), 0.0), 10.0, 1e-12);
  EXPECT_NEAR(boundary_g(std::exp(-10.0), 1.0), 10.0 + std::log(10.0), 1e-12);
  EXPECT_EQ(boundary_g(1.0, 0.0), 0.0);
  EXPECT_EQ(boundary_g(3.0, 1.0), 0.0);
  EXPECT_THROW(boundary_g(0.1, -0.5), ConfigError);
  EXPECT_GE(boundary_g(0.9, -0.4), 0.0);
}

TEST(BoundaryG, NonincreasingInT) {
  for (double xi : {0.0, 1.0}) {
    double last = boundary_g(1e-6, xi);
    for (int k = 1; k <= 500; ++k) {
      const double t = 1e-6 + (0.5 - 1e-6) * k / 500.0;
      const double g = boundary_g(t, xi);
      EXPECT_LE(g, last + 1e-12);
      last = g;
    }
  }
}

TEST(Schwarz, StopsAtFirstObservationForDistantData) {
  GlrConfig c;
  c.theta0 = 0.0;
  c.theta1 = 1.0;
  c.c = std::exp(-2.0);
  const std::vector<double> xs(10, 2.0);
  const Verdict v = schwarz_test(c, span_stream(xs));
  EXPECT_EQ(v.stop_time, 1u);
  EXPECT_EQ(v.decision, 1);
}

TEST(Schwarz, DataAtThetaStarLoopOracle) {
  GlrConfig c;
  c.c = std::exp(-2.0);
  const std::vector<double> xs(100, 0.5);
  const Verdict v = schwarz_test(c, span_stream(xs));
  std::size_t n = 0;
  double stat = 0.0;
  while (stat < 2.0) {
    ++n;
    stat = static_cast<double>(n) * std::max(0.5 * 0.25, 0.5 * 0.25);
  }
  EXPECT_EQ(v.stop_time, n);
  EXPECT_EQ(v.stop_time, 16u);
  EXPECT_EQ(v.decision, 1);  // theta_hat == theta* is not below it
}

TEST(Schwarz, ClippedMleStillFinite) {
  GlrConfig c;
  c.family = Family::bernoulli();
  c.theta0 = -0.5;
  c.theta1 = 0.5;
  c.c = 1e-2;
  const std::vector<double> xs(50, 1.0);
  const Verdict v = schwarz_test(c, span_stream(xs));
  EXPECT_TRUE(std::isfinite(v.final_statistic));
  EXPECT_FALSE(v.truncated);
  EXPECT_EQ(v.decision, 1);
}

TEST(Lai, OneSidedLoopOracle) {
  GlrConfig c;
  c.theta0 = 0.0;
  c.theta1 = 0.0;
  c.c = 1e-4;
  const std::vector<double> xs(1000, 1.0);
  const Verdict v = lai_test(c, span_stream(xs));
  std::size_t n = 0;
  for (;;) {
    ++n;
    const double t = c.c * static_cast<double>(n);
    const double g = t >= 1.0 ? 0.0 : std::abs(std::log(t));
    if (0.5 * static_cast<double>(n) >= g) break;
  }
  EXPECT_EQ(v.stop_time, n);
  EXPECT_EQ(v.decision, 1);
}

TEST(Lai, OneSidedTieAccepts) {
  GlrConfig c;
  c.theta0 = 0.0;
  c.theta1 = 0.0;
  c.c = 0.4;
  const std::vector<double> xs(5, 0.0);
  const Verdict v = lai_test(c, span_stream(xs));
  EXPECT_EQ(v.decision, 0);
}

TEST(Lai, DistantDataStopsAtOnce) {
  GlrConfig c;
  c.c = std::exp(-2.0);
  const std::vector<double> xs(10, 2.0);
  const Verdict v = lai_test(c, span_stream(xs));
  EXPECT_EQ(v.stop_time, 1u);
  EXPECT_EQ(v.decision, 1);
}

TEST(Lai, BoundaryCoincidesWithSchwarzAtFirstStepAndNeverStopsLater) {
  Rng rng(5, 0, 0);
  for (int rep = 0; rep < 300; ++rep) {
    std::vector<double> xs(5000);
    const double mean = rng.uniform() * 1.4 - 0.2;
    for (double& x : xs) x = rng.normal(mean, 1.0);
    GlrConfig c;
    c.c = 1e-3;
    c.max_n = 5000;
    const Verdict lai = lai_test(c, span_stream(xs));
    const Verdict sch = schwarz_test(c, span_stream(xs));
    EXPECT_LE(lai.stop_time, sch.stop_time);
    if (lai.stop_time == sch.stop_time) EXPECT_EQ(lai.decision, sch.decision);
  }
  EXPECT_NEAR(boundary_g(1e-3 * 1.0, 0.0), std::abs(std::log(1e-3)), 1e-12);
}

TEST(Lai, StopTimeNonincreasingInCost) {
  Rng rng(6, 0, 0);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> xs(20000);
    for (double& x : xs) x = rng.normal(0.6, 1.0);
    std::size_t last = 0;
    bool first = true;
    for (int k = 8; k >= 2; --k) {  // c increasing from e^-8 to e^-2
      GlrConfig c;
      c.c = std::exp(-static_cast<double>(k));
      c.max_n = 20000;
      const Verdict v = lai_test(c, span_stream(xs));
      if (!first) EXPECT_LE(v.stop_time, last);
      last = v.stop_time;
      first = false;
    }
  }
}

TEST(Glr, ConfigErrors) {
  GlrConfig c;
  c.c = 1.5;
  EXPECT_THROW(validate(c), ConfigError);
  c.c = 1e-3;
  c.xi = -0.6;
  EXPECT_THROW(validate(c), ConfigError);
  c.xi = 0.0;
  c.theta1 = -1.0;
  EXPECT_THROW(validate(c), ConfigError);
  GlrConfig e;
  e.family = Family::exponential();
  e.theta0 = 0.5;
  e.theta1 = 1.0;
  EXPECT_THROW(validate(e), DomainError);
  GlrConfig one;
  one.theta1 = one.theta0;
  const std::vector<double> xs(3, 1.0);
  EXPECT_THROW(schwarz_test(one, span_stream(xs)), ConfigError);
}
