#pragma once

// Bayesian multiple-changepoint filtering for exponential families with
// conjugate priors: forward and backward filters (exact or BCMIX-pruned),
// the smoother built from them, surveillance rules, and empirical-Bayes
// estimation of the change frequency p.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "seqlab/expfam.hpp"

namespace seqlab::bcmix {

struct HyperParams {
  double p = 0.01;
  double a0 = 1.0;
  double mu0 = 0.0;
  expfam::Family family = expfam::Family::gaussian();
};

void validate(const HyperParams& hp);

// log pi_{0,0} = log c(a0, mu0).
double log_pi00(const HyperParams& hp);
// log c for a segment with the given sufficient statistics.
double log_pi_of(const HyperParams& hp, double seg_sum, double seg_count);
// Posterior mean (a0 mu0 + seg_sum) / (a0 + seg_count).
double segment_mean(const HyperParams& hp, double seg_sum, double seg_count);

enum class Direction { forward, backward };

struct WeightEntry {
  // Segment start i (forward) or segment end j (backward), 1-based.
  std::size_t index;
  double log_weight;
  double seg_sum;
  double seg_count;
  // log pi of the segment covered by seg_sum / seg_count.
  double log_pi;
};

struct WeightSet {
  std::size_t t = 0;
  Direction direction = Direction::forward;
  // Ordered from the oldest candidate (in processing order) to the newest;
  // the newest entry has index == t.
  std::vector<WeightEntry> entries;
  // log of the unnormalised mass sum_i p*_{it} before pruning.
  double log_mass = 0.0;
};

struct PruneOptions {
  std::size_t m = 10;  // most recent candidates that are never removed
  std::size_t M = 20;  // maximum number of retained candidates
};

// One step of the exact recursion. `prev` must be the set at t-1 (empty with
// t = 0 to start); x is X_t for the forward filter and X_t for the backward
// filter running from n down to t.
WeightSet forward_step(const HyperParams& hp, const WeightSet& prev, double x);
WeightSet backward_step(const HyperParams& hp, const WeightSet& next, double x);

// Removes at most one unprotected minimum-weight entry when the set holds
// more than M candidates, then renormalises. Ties remove the oldest entry.
void bcmix_prune(WeightSet& weights, std::size_t m, std::size_t M);

struct FilterEstimate {
  double change_prob;
  double posterior_mean;
};

FilterEstimate filter_estimates(const HyperParams& hp, const WeightSet& weights);

// Weight snapshots for t = 1..n. forward_filter(...)[t-1] covers X_1..X_t,
// backward_filter(...)[t-1] covers X_t..X_n.
std::vector<WeightSet> forward_filter(const HyperParams& hp, std::span<const double> xs,
                                      const std::optional<PruneOptions>& prune = std::nullopt);
std::vector<WeightSet> backward_filter(const HyperParams& hp, std::span<const double> xs,
                                       const std::optional<PruneOptions>& prune = std::nullopt);

// Non-recursive forward weights p_it proportional to
// p (1-p)^{t-i} pi00 / pi_{i,t} for i = 1..t.
WeightSet closed_form_weights(const HyperParams& hp, std::span<const double> xs, std::size_t t);

struct SmootherEntry {
  std::size_t i;
  std::size_t j;
  double log_beta;
  double seg_sum;
  double seg_count;
};

struct SmootherWeights {
  std::size_t t = 0;
  std::vector<SmootherEntry> entries;
  // log P*_t; 0 at t = n where the forward weights are used directly.
  double log_pstar = 0.0;
};

// Combines forward weights at t with backward weights at t+1. Pass nullptr
// for `backward` at t = n.
SmootherWeights smooth(const HyperParams& hp, const WeightSet& forward,
                       const WeightSet* backward);

struct SmoothEstimate {
  // P(I_t = 1 | X^n); 1 at t = 1.
  double change_prob;
  double posterior_mean;
};

// Smoothed estimates for t = 1..n from forward/backward snapshot sequences
// (exact or BCMIX). At t = n the filter estimates are returned unchanged.
std::vector<SmoothEstimate> smooth_estimates(const HyperParams& hp,
                                             std::span<const WeightSet> forward,
                                             std::span<const WeightSet> backward);

std::vector<SmoothEstimate> smoother(const HyperParams& hp, std::span<const double> xs,
                                     const std::optional<PruneOptions>& prune = std::nullopt);

// Sum over i in [max(1, n-k), n] of pi00 pi_{1,n} / ((1-p)^{n-i+1} pi_{1,i-1} pi_{i,n}),
// with pi_{1,0} = pi00. Recomputed each step from prefix sums in O(k).
class ExtendedShiryaev {
 public:
  ExtendedShiryaev(const HyperParams& hp, std::size_t k);
  void push(double x);
  std::size_t n() const { return sums_.size(); }
  double log_statistic() const;
  double statistic() const;

 private:
  HyperParams hp_;
  std::size_t k_;
  double log_pi00_;
  expfam::PrefixSums sums_;
};

struct Alarm {
  std::size_t time;
  double statistic;
};

std::optional<Alarm> extended_shiryaev(const HyperParams& hp, std::size_t n0, std::size_t k,
                                       double gamma, std::span<const double> xs);

// Sum of forward weights p_in over i in [n-k, n].
double window_mass(const WeightSet& weights, std::size_t k);

std::optional<Alarm> mcp_surveil(const HyperParams& hp, std::size_t k, double gamma,
                                 std::size_t n0, std::span<const double> xs,
                                 const PruneOptions& prune = {});

// ceil(slack |log p| / info), a suggested surveillance window.
std::size_t suggest_window(double p, double info, double slack = 1.5);

// l(p) = sum_t log sum_i p*_{it}, with the t = 1 term taken as the
// predictive of X_1 (no factor p) and log h(X_t) included.
double log_likelihood(const HyperParams& hp, std::span<const double> xs,
                      const std::optional<PruneOptions>& prune = std::nullopt);

struct FitResult {
  HyperParams params;
  std::vector<double> grid;
  std::vector<double> log_lik;
};

// {2^j / n : j >= 0, 2^j <= n / 10}.
std::vector<double> default_p_grid(std::size_t n);

struct FitOptions {
  double a0 = 1.0;
  // Empty means default_p_grid(n).
  std::vector<double> grid;
  std::optional<PruneOptions> prune = PruneOptions{};
};

FitResult fit_hyperparams(const expfam::Family& family, std::span<const double> xs,
                          const FitOptions& options = {});

// Versioned text snapshot of a forward WeightSet plus its hyperparameters.
void save_snapshot(std::ostream& out, const HyperParams& hp, const WeightSet& weights);
std::pair<HyperParams, WeightSet> load_snapshot(std::istream& in);

}  // namespace seqlab::bcmix
