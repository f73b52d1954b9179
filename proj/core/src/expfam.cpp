#include "seqlab/expfam.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "seqlab/errors.hpp"
#include "seqlab/numeric.hpp"

namespace seqlab::expfam {

namespace {

constexpr double kLogTwoPi = 1.8378770664093454836;

double log1p_exp(double t) { return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }

double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

}  // namespace

Family Family::from_name(std::string_view name) {
  if (name == "gaussian" || name == "normal") return gaussian();
  if (name == "bernoulli") return bernoulli();
  if (name == "poisson") return poisson();
  if (name == "exponential") return exponential();
  throw ConfigError("unknown family '" + std::string(name) + "'");
}

std::array<Family, 4> Family::builtins() {
  return {gaussian(), bernoulli(), poisson(), exponential()};
}

std::string_view Family::name() const {
  switch (kind_) {
    case FamilyKind::gaussian: return "gaussian";
    case FamilyKind::bernoulli: return "bernoulli";
    case FamilyKind::poisson: return "poisson";
    case FamilyKind::exponential: return "exponential";
  }
  return "unknown";
}

Interval Family::domain() const {
  if (kind_ == FamilyKind::exponential) return {-kInf, 0.0};
  return {-kInf, kInf};
}

Interval Family::mean_domain() const {
  switch (kind_) {
    case FamilyKind::gaussian: return {-kInf, kInf};
    case FamilyKind::bernoulli: return {0.0, 1.0};
    case FamilyKind::poisson:
    case FamilyKind::exponential: return {0.0, kInf};
  }
  return {-kInf, kInf};
}

double Family::b(double theta) const {
  switch (kind_) {
    case FamilyKind::gaussian: return 0.5 * theta * theta;
    case FamilyKind::bernoulli: return log1p_exp(theta);
    case FamilyKind::poisson: return std::exp(theta);
    case FamilyKind::exponential: return -std::log(-theta);
  }
  return 0.0;
}

double Family::b1(double theta) const {
  switch (kind_) {
    case FamilyKind::gaussian: return theta;
    case FamilyKind::bernoulli: return sigmoid(theta);
    case FamilyKind::poisson: return std::exp(theta);
    case FamilyKind::exponential: return -1.0 / theta;
  }
  return 0.0;
}

double Family::b2(double theta) const {
  switch (kind_) {
    case FamilyKind::gaussian: return 1.0;
    case FamilyKind::bernoulli: {
      const double s = sigmoid(theta);
      return s * (1.0 - s);
    }
    case FamilyKind::poisson: return std::exp(theta);
    case FamilyKind::exponential: return 1.0 / (theta * theta);
  }
  return 0.0;
}

double Family::log_base(double x) const {
  switch (kind_) {
    case FamilyKind::gaussian: return -0.5 * x * x - 0.5 * kLogTwoPi;
    case FamilyKind::bernoulli: return (x == 0.0 || x == 1.0) ? 0.0 : -kInf;
    case FamilyKind::poisson:
      return (x >= 0.0 && x == std::floor(x)) ? -std::lgamma(x + 1.0) : -kInf;
    case FamilyKind::exponential: return x >= 0.0 ? 0.0 : -kInf;
  }
  return -kInf;
}

double Family::sample(double theta, Rng& rng) const {
  switch (kind_) {
    case FamilyKind::gaussian: return theta + rng.normal();
    case FamilyKind::bernoulli: return rng.uniform() < sigmoid(theta) ? 1.0 : 0.0;
    case FamilyKind::poisson:
      return static_cast<double>(std::poisson_distribution<long long>(std::exp(theta))(rng));
    case FamilyKind::exponential: return rng.exponential(-theta);
  }
  return 0.0;
}

void Family::require_in_domain(double theta) const {
  if (!std::isfinite(theta) || !domain().contains(theta)) {
    throw DomainError("natural parameter " + std::to_string(theta) + " outside the " +
                      std::string(name()) + " domain");
  }
}

double Family::natural_from_mean(double mu) const {
  const Interval md = mean_domain();
  if (!md.contains(mu)) {
    throw DomainError("mean parameter " + std::to_string(mu) + " outside the " +
                      std::string(name()) + " mean domain");
  }
  const Interval d = domain();
  // Bracket the root, then halve until the bracket stops shrinking.
  double lo = std::isfinite(d.hi) ? d.hi - 1.0 : -1.0;
  double hi = std::isfinite(d.hi) ? d.hi - 1.0 : 1.0;
  for (int k = 0; b1(lo) >= mu; ++k) {
    if (k > 2000) throw NumericError("cannot bracket natural parameter from below");
    lo = std::isfinite(d.hi) ? d.hi - 2.0 * (d.hi - lo) : lo - 2.0 * std::max(1.0, std::abs(lo));
  }
  for (int k = 0; b1(hi) <= mu; ++k) {
    if (k > 2000) throw NumericError("cannot bracket natural parameter from above");
    hi = std::isfinite(d.hi) ? d.hi - 0.5 * (d.hi - hi) : hi + 2.0 * std::max(1.0, std::abs(hi));
  }
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (b1(mid) < mu) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return std::abs(b1(lo) - mu) <= std::abs(b1(hi) - mu) ? lo : hi;
}

double Family::log_normalizer(double a, double mu) const {
  switch (kind_) {
    case FamilyKind::gaussian: return -0.5 * a * mu * mu + 0.5 * std::log(a) - 0.5 * kLogTwoPi;
    case FamilyKind::bernoulli:
      if (mu <= 0.0 || mu >= 1.0) return -kInf;
      return std::lgamma(a) - std::lgamma(a * mu) - std::lgamma(a * (1.0 - mu));
    case FamilyKind::poisson:
      if (mu <= 0.0) return -kInf;
      return a * mu * std::log(a) - std::lgamma(a * mu);
    case FamilyKind::exponential:
      if (mu <= 0.0) return -kInf;
      return (a + 1.0) * std::log(a * mu) - std::lgamma(a + 1.0);
  }
  return -kInf;
}

double log_normalizer_quadrature(const Family& family, double a, double mu) {
  using boost::math::quadrature::gauss_kronrod;
  const double mode = family.natural_from_mean(mu);
  const double scale = 1.0 / std::sqrt(a * family.b2(mode));
  const double peak = a * mu * mode - a * family.b(mode);
  const Interval d = family.domain();
  auto integrand = [&](double s) {
    const double theta = mode + scale * s;
    if (!d.contains(theta)) return 0.0;
    return std::exp(a * mu * theta - a * family.b(theta) - peak);
  };
  const double lo = std::isfinite(d.lo) ? (d.lo - mode) / scale : -kInf;
  const double hi = std::isfinite(d.hi) ? (d.hi - mode) / scale : kInf;
  double err = 0.0;
  const double value = gauss_kronrod<double, 31>::integrate(integrand, lo, hi, 25, 1e-13, &err);
  if (!(value > 0.0) || !std::isfinite(value)) throw NumericError("quadrature failed");
  return -(peak + std::log(scale) + std::log(value));
}

double log_density_ratio(const Family& family, double theta, double lambda, double x) {
  family.require_in_domain(theta);
  family.require_in_domain(lambda);
  return (theta - lambda) * x - (family.b(theta) - family.b(lambda));
}

double kl(const Family& family, double theta, double lambda) {
  family.require_in_domain(theta);
  family.require_in_domain(lambda);
  if (theta == lambda) return 0.0;
  const double v = (theta - lambda) * family.b1(theta) - (family.b(theta) - family.b(lambda));
  return std::max(v, 0.0);
}

double mle(const Family& family, double sum, std::size_t n, const MleOptions& options) {
  if (n == 0) throw ConfigError("mle requires n >= 1");
  const Interval md = family.mean_domain();
  const double margin =
      std::isfinite(md.width()) ? options.clip_margin * md.width() : options.clip_margin;
  double mean = sum / static_cast<double>(n);
  if (std::isfinite(md.lo) && mean < md.lo + margin) mean = md.lo + margin;
  if (std::isfinite(md.hi) && mean > md.hi - margin) mean = md.hi - margin;
  return family.natural_from_mean(mean);
}

ConjugatePrior make_prior(const Family& family, double a, double mu) {
  if (!(a > 0.0) || !std::isfinite(a)) throw ConfigError("conjugate prior requires a > 0");
  if (!family.mean_domain().contains_closed(mu) || !std::isfinite(mu)) {
    throw DomainError("prior mean " + std::to_string(mu) + " outside the closure of the " +
                      std::string(family.name()) + " mean domain");
  }
  return {a, mu, family.log_normalizer(a, mu)};
}

ConjugatePrior posterior_update(const Family& family, const ConjugatePrior& prior, double sum,
                                std::size_t m) {
  if (m == 0) return prior;
  const double a = prior.a + static_cast<double>(m);
  const double mu = (prior.a * prior.mu + sum) / a;
  return {a, mu, family.log_normalizer(a, mu)};
}

double log_predictive(const Family& family, const ConjugatePrior& prior, double x) {
  if (!std::isfinite(x)) throw DataError("non-finite observation");
  const double a1 = prior.a + 1.0;
  const double next = family.log_normalizer(a1, (prior.a * prior.mu + x) / a1);
  if (!std::isfinite(prior.log_c) || !std::isfinite(next)) {
    throw NumericError("conjugate normaliser is not finite");
  }
  return prior.log_c - next + family.log_base(x);
}

PrefixSums::PrefixSums(std::span<const double> xs) {
  cum_.reserve(xs.size() + 1);
  cum_.push_back(0.0);
  for (double x : xs) cum_.push_back(cum_.back() + x);
}

double PrefixSums::sum(std::size_t i, std::size_t j) const {
  if (i == 0 || j > size() || i > j + 1) throw ConfigError("segment index out of range");
  return cum_[j] - cum_[i - 1];
}

double log_pi(const Family& family, double a0, double mu0, std::size_t i, std::size_t j,
              const PrefixSums& sums) {
  if (i == j + 1) return family.log_normalizer(a0, mu0);
  const double count = static_cast<double>(j - i + 1);
  return log_pi_segment(family, a0, mu0, sums.sum(i, j), count);
}

}  // namespace seqlab::expfam
