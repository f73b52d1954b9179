#pragma once

// One-parameter exponential families f_theta(x) = h(x) exp{theta x - b(theta)}
// and their conjugate priors pi(theta; a, mu) = c(a, mu) exp{a mu theta - a b(theta)}.

#include <array>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "seqlab/rng.hpp"

namespace seqlab::expfam {

struct Interval {
  double lo;
  double hi;

  bool contains(double x) const { return x > lo && x < hi; }
  bool contains_closed(double x) const { return x >= lo && x <= hi; }
  double width() const { return hi - lo; }
};

enum class FamilyKind { gaussian, bernoulli, poisson, exponential };

class Family {
 public:
  // Normal with unit variance, b(theta) = theta^2 / 2.
  static Family gaussian() { return Family(FamilyKind::gaussian); }
  // b(theta) = log(1 + e^theta).
  static Family bernoulli() { return Family(FamilyKind::bernoulli); }
  // b(theta) = e^theta.
  static Family poisson() { return Family(FamilyKind::poisson); }
  // Exponential with rate -theta, b(theta) = -log(-theta), theta < 0.
  static Family exponential() { return Family(FamilyKind::exponential); }

  // Throws ConfigError for an unknown name.
  static Family from_name(std::string_view name);
  static std::array<Family, 4> builtins();

  FamilyKind kind() const { return kind_; }
  std::string_view name() const;

  Interval domain() const;
  // Image of the domain under b'; the valid range of mean parameters.
  Interval mean_domain() const;

  double b(double theta) const;
  double b1(double theta) const;
  double b2(double theta) const;

  // log h(x); -inf outside the support.
  double log_base(double x) const;
  double sample(double theta, Rng& rng) const;

  // Solves b'(theta) = mu by bisection. mu must be interior to mean_domain().
  double natural_from_mean(double mu) const;

  // Closed-form log c(a, mu). Returns -inf when mu sits on the boundary of the
  // mean domain (the prior is not normalisable there).
  double log_normalizer(double a, double mu) const;

  // Throws DomainError unless theta is in the open natural domain.
  void require_in_domain(double theta) const;

  friend bool operator==(const Family&, const Family&) = default;

 private:
  explicit Family(FamilyKind kind) : kind_(kind) {}
  FamilyKind kind_;
};

// Numerical log c(a, mu) by adaptive Gauss-Kronrod quadrature of
// exp{a mu theta - a b(theta)} over the natural domain.
double log_normalizer_quadrature(const Family& family, double a, double mu);

// log f_theta(x) / f_lambda(x).
double log_density_ratio(const Family& family, double theta, double lambda, double x);

// Kullback-Leibler information I(theta, lambda) = E_theta[log f_theta / f_lambda].
double kl(const Family& family, double theta, double lambda);

struct MleOptions {
  // Fraction of the mean-domain width (or an absolute amount when the width is
  // infinite) by which out-of-range sample means are pulled inside.
  double clip_margin = 1e-6;
};

// Maximum likelihood estimate of theta from a sufficient statistic; sample
// means outside b'(domain) are clipped to the nudged boundary.
double mle(const Family& family, double sum, std::size_t n, const MleOptions& options = {});

struct ConjugatePrior {
  double a;
  double mu;
  double log_c;
};

ConjugatePrior make_prior(const Family& family, double a, double mu);
ConjugatePrior posterior_update(const Family& family, const ConjugatePrior& prior, double sum,
                                std::size_t m);

// Log predictive density of x (with respect to Lebesgue or counting measure).
double log_predictive(const Family& family, const ConjugatePrior& prior, double x);

// Prefix sums over a 1-based observation sequence; sum(i, j) covers X_i..X_j.
class PrefixSums {
 public:
  PrefixSums() : cum_{0.0} {}
  explicit PrefixSums(std::span<const double> xs);

  void push_back(double x) { cum_.push_back(cum_.back() + x); }
  std::size_t size() const { return cum_.size() - 1; }
  // Requires 1 <= i and j <= size(); i == j + 1 denotes the empty segment.
  double sum(std::size_t i, std::size_t j) const;

 private:
  std::vector<double> cum_;
};

// Segment normaliser log pi_{i,j} = log c(a0 + j - i + 1, Xbar_{i,j}) with the
// empty segment (j = i - 1) mapping to log pi_{0,0} = log c(a0, mu0).
double log_pi(const Family& family, double a0, double mu0, std::size_t i, std::size_t j,
              const PrefixSums& sums);

// log c for a segment given its raw sum and length.
inline double log_pi_segment(const Family& family, double a0, double mu0, double seg_sum,
                             double seg_count) {
  const double a = a0 + seg_count;
  return family.log_normalizer(a, (a0 * mu0 + seg_sum) / a);
}

}  // namespace seqlab::expfam
