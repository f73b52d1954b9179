#include "seqlab/renewal.hpp"

#include <algorithm>

#include "seqlab/sim.hpp"

namespace seqlab::renewal {

Sampler gaussian_sampler(double mean, double sd) {
  if (!(sd > 0.0)) throw ConfigError("standard deviation must be positive");
  return [mean, sd](Rng& rng) { return rng.normal(mean, sd); };
}

Sampler exponential_sampler(double rate) {
  if (!(rate > 0.0)) throw ConfigError("rate must be positive");
  return [rate](Rng& rng) { return rng.exponential(rate); };
}

Sampler family_sampler(const expfam::Family& family, double theta) {
  family.require_in_domain(theta);
  return [family, theta](Rng& rng) { return family.sample(theta, rng); };
}

std::function<JointIncrement(Rng&)> joint_gaussian_sampler(double mu, std::size_t d, double rho) {
  if (d < 1) throw ConfigError("perturbation dimension must be at least 1");
  if (!(rho >= -1.0 && rho <= 1.0)) throw ConfigError("correlation must lie in [-1, 1]");
  const double tail = std::sqrt(1.0 - rho * rho);
  return [mu, d, rho, tail](Rng& rng) {
    JointIncrement z;
    const double z0 = rng.normal();
    z.x = mu + z0;
    z.y.resize(d);
    for (std::size_t k = 0; k < d; ++k) z.y[k] = rho * z0 + tail * rng.normal();
    return z;
  };
}

namespace {

void check(const SimOptions& o) {
  if (o.reps < 2) throw ConfigError("reps must be at least 2");
  if (o.max_n < 1) throw ConfigError("max_n must be at least 1");
}

}  // namespace

RenewalEstimate estimate_rho(const Sampler& sampler, double u, const SimOptions& options) {
  check(options);
  ReplicateOptions ro{options.reps, options.seed, options.workers};
  const std::vector<double> raw =
      replicate_raw(2, ro, [&](std::size_t, Rng& rng, std::span<double> out) {
        const Crossing c = cross_linear(sampler_stream(sampler, rng), 0.0, u, options.max_n);
        out[0] = c.truncated ? std::nan("") : c.overshoot;
        out[1] = c.truncated ? 1.0 : 0.0;
      });
  Welford r1;
  Welford r2;
  std::size_t truncated = 0;
  double sum_r3 = 0.0;
  for (std::size_t k = 0; k < options.reps; ++k) {
    if (raw[2 * k + 1] != 0.0) {
      ++truncated;
      continue;
    }
    const double r = raw[2 * k];
    r1.add(r);
    r2.add(r * r);
    sum_r3 += r * r * r;
  }
  const double n = static_cast<double>(r1.count());
  if (r1.count() < 2) throw NumericError("too few completed ladder crossings");
  const double a = r2.mean();
  const double b = r1.mean();
  // Sample covariance of (R, R^2).
  const double cov = (sum_r3 - n * a * b) / (n - 1.0);
  const double var_b = r1.variance();
  const double var_a = r2.variance();
  const double ga = 1.0 / (2.0 * b);
  const double gb = -a / (2.0 * b * b);
  const double var_r = (ga * ga * var_a + 2.0 * ga * gb * cov + gb * gb * var_b) / n;
  RenewalEstimate est;
  est.r_u = a / (2.0 * b);
  est.rho_plus = {est.r_u, std::sqrt(std::max(var_r, 0.0))};
  est.mean_overshoot = {b, r1.std_error()};
  est.mean_sq_overshoot = {a, r2.std_error()};
  est.reps = r1.count();
  est.truncated = truncated;
  return est;
}

PassageSummary simulate_linear(const Sampler& sampler, double c, double u,
                               const SimOptions& options) {
  check(options);
  ReplicateOptions ro{options.reps, options.seed, options.workers};
  const std::vector<double> raw =
      replicate_raw(4, ro, [&](std::size_t, Rng& rng, std::span<double> out) {
        const Crossing x = cross_linear(sampler_stream(sampler, rng), c, u, options.max_n);
        out[0] = static_cast<double>(x.tau);
        out[1] = x.s_tau;
        out[2] = x.overshoot;
        out[3] = x.truncated ? 1.0 : 0.0;
      });
  Welford tau;
  Welford s;
  Welford ov;
  std::size_t truncated = 0;
  for (std::size_t k = 0; k < options.reps; ++k) {
    tau.add(raw[4 * k]);
    s.add(raw[4 * k + 1]);
    ov.add(raw[4 * k + 2]);
    if (raw[4 * k + 3] != 0.0) ++truncated;
  }
  return {{tau.mean(), tau.std_error()},
          {s.mean(), s.std_error()},
          {ov.mean(), ov.std_error()},
          options.reps,
          truncated};
}

double corrected_expectation(double b, double mu, double rho_plus, double c0) {
  if (!(mu > 0.0)) throw ConfigError("drift mu must be positive");
  if (!(b >= 0.0)) throw ConfigError("boundary b must be nonnegative");
  return (b + c0 * std::sqrt(b) + rho_plus) / mu;
}

LinearFit weighted_fit(std::span<const double> x, std::span<const double> y,
                       std::span<const double> se) {
  const std::size_t n = x.size();
  if (n < 2) throw ConfigError("a linear fit needs at least 2 points");
  if (y.size() != n || (!se.empty() && se.size() != n)) throw ConfigError("fit inputs differ in length");
  bool known = !se.empty();
  for (double s : se) known = known && s > 0.0;
  double sw = 0.0;
  double sx = 0.0;
  double sy = 0.0;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double w = known ? 1.0 / (se[k] * se[k]) : 1.0;
    sw += w;
    sx += w * x[k];
    sy += w * y[k];
    sxx += w * x[k] * x[k];
    sxy += w * x[k] * y[k];
  }
  const double det = sw * sxx - sx * sx;
  if (!(det > 0.0)) throw ConfigError("fit abscissae must not all coincide");
  LinearFit f;
  f.slope = (sw * sxy - sx * sy) / det;
  f.intercept = (sxx * sy - sx * sxy) / det;
  double scale = 1.0;
  if (!known) {
    double rss = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double r = y[k] - f.intercept - f.slope * x[k];
      rss += r * r;
    }
    scale = n > 2 ? rss / static_cast<double>(n - 2) : std::nan("");
  }
  f.slope_se = std::sqrt(scale * sw / det);
  f.intercept_se = std::sqrt(scale * sxx / det);
  return f;
}

LinearFit fit_c0(std::span<const double> b, std::span<const double> mean_tau,
                 std::span<const double> tau_se, double mu) {
  if (b.size() < 2) throw ConfigError("fit_c0 needs at least 2 boundary values");
  if (!(mu > 0.0)) throw ConfigError("drift mu must be positive");
  std::vector<double> x(b.size());
  std::vector<double> y(b.size());
  std::vector<double> se;
  for (std::size_t k = 0; k < b.size(); ++k) {
    x[k] = std::sqrt(b[k]);
    y[k] = mu * mean_tau[k] - b[k];
  }
  if (!tau_se.empty()) {
    for (double s : tau_se) se.push_back(mu * s);
  }
  return weighted_fit(x, y, se);
}

}  // namespace seqlab::renewal
