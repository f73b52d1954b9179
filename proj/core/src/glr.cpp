#include "seqlab/glr.hpp"

#include <string>

#include "seqlab/numeric.hpp"

namespace seqlab::glr {

void validate(const GlrConfig& config) {
  if (!(config.c > 0.0 && config.c < 1.0)) throw ConfigError("cost c must lie in (0, 1)");
  if (!(config.xi > -0.5)) throw ConfigError("boundary exponent xi must exceed -1/2");
  if (config.theta1 < config.theta0) throw ConfigError("theta1 must be >= theta0");
  if (config.max_n < 1) throw ConfigError("max_n must be at least 1");
  config.family.require_in_domain(config.theta0);
  config.family.require_in_domain(config.theta1);
}

double theta_star(const expfam::Family& family, double theta0, double theta1) {
  if (!(theta0 < theta1)) throw ConfigError("theta_star requires theta0 < theta1");
  family.require_in_domain(theta0);
  family.require_in_domain(theta1);
  auto g = [&](double th) { return expfam::kl(family, th, theta0) - expfam::kl(family, th, theta1); };
  const double glo = g(theta0);
  const double ghi = g(theta1);
  if (!(glo < 0.0 && ghi > 0.0)) throw NumericError("no sign change for theta*");
  // Run bisection until the bracket cannot shrink further.
  double lo = theta0;
  double hi = theta1;
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double gm = g(mid);
    if (gm == 0.0) return mid;
    if (gm < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return std::abs(g(lo)) <= std::abs(g(hi)) ? lo : hi;
}

double boundary_g(double t, double xi) {
  if (!(xi > -0.5)) throw ConfigError("boundary exponent xi must exceed -1/2");
  if (!(t > 0.0)) throw ConfigError("boundary argument must be positive");
  if (t >= 1.0) return 0.0;
  const double lt = std::abs(std::log(t));
  const double llt = std::log(lt);
  if (xi >= 0.0) return lt + xi * std::max(0.0, llt);
  return std::max(0.0, lt + xi * llt);
}

double glr_statistic(const GlrConfig& config, double theta_hat, std::size_t n) {
  const double i0 = expfam::kl(config.family, theta_hat, config.theta0);
  const double i1 = config.theta1 == config.theta0
                        ? i0
                        : expfam::kl(config.family, theta_hat, config.theta1);
  return static_cast<double>(n) * std::max(i0, i1);
}

}  // namespace seqlab::glr
