#include "seqlab/groupseq.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>

#include "seqlab/errors.hpp"
#include "seqlab/numeric.hpp"
#include "seqlab/rng.hpp"
#include "seqlab/sim.hpp"

namespace seqlab::groupseq {

using expfam::Family;

namespace {

void require_probability(double p, const char* what) {
  if (!(p > 0.0 && p < 1.0)) throw ConfigError(std::string(what) + " must lie in (0, 1)");
}

double info_or_inf(double x, double info) { return info > 0.0 ? x / info : kInf; }

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

double futility_value(const Design& d) { return d.four_stage ? d.u2 : d.u1; }

}  // namespace

double hoeffding_bound(const Family& family, double theta, double theta0, double theta1,
                       double alpha, double beta) {
  require_probability(alpha, "alpha");
  require_probability(beta, "beta");
  if (!(alpha + beta < 1.0)) throw ConfigError("alpha + beta must be below 1");
  family.require_in_domain(theta);
  family.require_in_domain(theta0);
  family.require_in_domain(theta1);
  const double zeta = std::max(expfam::kl(family, theta, theta0), expfam::kl(family, theta, theta1));
  if (!(zeta > 0.0)) return kInf;
  const double sigma = std::abs(theta1 - theta0) * std::sqrt(family.b2(theta));
  const double la = std::log(alpha + beta);
  const double root = std::sqrt((sigma / 4.0) * (sigma / 4.0) - zeta * la);
  const double value = -la / zeta - sigma / (2.0 * zeta * zeta) * root +
                       sigma * sigma / (8.0 * zeta * zeta);
  return std::max(value, 0.0);
}

double n_opt(const Family& family, double theta, double u0, double u1, double alpha,
             double alpha_tilde) {
  require_probability(alpha, "alpha");
  require_probability(alpha_tilde, "alpha_tilde");
  family.require_in_domain(theta);
  const double first = info_or_inf(std::abs(std::log(alpha)), expfam::kl(family, theta, u0));
  const double second =
      info_or_inf(std::abs(std::log(alpha_tilde)), expfam::kl(family, theta, u1));
  return std::min(first, second);
}

double signed_root(double lambda, std::size_t n, double theta_hat, double u_j) {
  if (!(lambda >= 0.0)) throw ConfigError("GLR value must be nonnegative");
  const double r = std::sqrt(2.0 * static_cast<double>(n) * lambda);
  if (theta_hat > u_j) return r;
  if (theta_hat < u_j) return -r;
  return 0.0;
}

double log_glr(const Family& family, double theta_hat, std::size_t n, double u) {
  return static_cast<double>(n) * expfam::kl(family, theta_hat, u);
}

void validate(const Design& d) {
  d.family.require_in_domain(d.u0);
  d.family.require_in_domain(d.u1);
  if (!(d.u0 < d.u1)) throw ConfigError("u0 must be below u1");
  require_probability(d.alpha, "alpha");
  require_probability(d.alpha_tilde, "alpha_tilde");
  require_probability(d.eps, "eps");
  require_probability(d.eps_tilde, "eps_tilde");
  if (!(d.rho_m > 0.0)) throw ConfigError("rho_m must be positive");
  if (d.m < 1) throw ConfigError("m must be at least 1");
  if (!(d.m < d.M)) throw ConfigError("m must be below M");
  if (d.four_stage) {
    d.family.require_in_domain(d.u2);
    if (!(d.u0 < d.u2 && d.u2 <= d.u1)) throw ConfigError("u2 must satisfy u0 < u2 <= u1");
    if (!(d.M <= d.M_prime && d.M_prime <= d.M_tilde))
      throw ConfigError("stage limits must satisfy M <= M' <= M~");
  }
}

void validate(const Thresholds& t) {
  for (double v : {t.b, t.b_tilde, t.c}) {
    if (!(std::isfinite(v) && v > 0.0)) throw ConfigError("thresholds must be finite and positive");
  }
}

namespace {

std::size_t inflated_size(const Design& d, double n, std::size_t lo, std::size_t hi) {
  if (!std::isfinite(n)) return std::max(lo, hi);
  const double want = std::ceil((1.0 + d.rho_m) * n);
  const std::size_t capped =
      want >= static_cast<double>(hi) ? hi : static_cast<std::size_t>(std::max(want, 0.0));
  return std::max(lo, capped);
}

}  // namespace

std::size_t stage2_size(const Design& d, double theta_hat_m) {
  const double n = n_opt(d.family, theta_hat_m, d.u0, futility_value(d), d.alpha, d.alpha_tilde);
  return inflated_size(d, n, d.m, d.M);
}

std::size_t stage3_size(const Design& d, std::size_t n2, double theta_hat_n2) {
  if (d.M_tilde == d.M) return d.M_tilde;
  const double n = n_opt(d.family, theta_hat_n2, d.u0, d.u2, d.alpha, d.alpha_tilde);
  return inflated_size(d, n, n2, d.M_prime);
}

std::size_t final_size(const Design& d) { return d.four_stage ? d.M_tilde : d.M; }

std::string trigger_name(Trigger t) {
  switch (t) {
    case Trigger::interim_reject:
      return "interim_reject";
    case Trigger::futility:
      return "futility";
    case Trigger::final_test:
      return "final";
  }
  return "final";
}

namespace {

// Size of the next look given the looks so far, or nullopt after the final one.
std::optional<std::size_t> next_look(const Design& d, const Path& path) {
  const std::size_t k = path.n.size();
  const std::size_t N = final_size(d);
  if (k == 0) return d.m;
  if (path.n.back() == N) return std::nullopt;
  if (k == 1) return stage2_size(d, path.theta_hat[0]);
  if (d.four_stage && k == 2) return stage3_size(d, path.n[1], path.theta_hat[1]);
  return N;
}

// Stopping rules at one look; nullopt means continue.
std::optional<StageOutcome> apply_rules(const Design& d, const Thresholds& th, int stage,
                                        std::size_t n, double theta_hat) {
  if (n == final_size(d)) {
    const bool reject = theta_hat > d.u0 && log_glr(d.family, theta_hat, n, d.u0) >= th.c;
    return StageOutcome{stage, n, reject, Trigger::final_test};
  }
  const double uf = futility_value(d);
  if (theta_hat < uf && log_glr(d.family, theta_hat, n, uf) >= th.b_tilde)
    return StageOutcome{stage, n, false, Trigger::futility};
  if (theta_hat > d.u0 && log_glr(d.family, theta_hat, n, d.u0) >= th.b)
    return StageOutcome{stage, n, true, Trigger::interim_reject};
  return std::nullopt;
}

template <class SumAt>
Path path_from(const Design& d, SumAt&& sum_at) {
  Path path;
  while (auto n = next_look(d, path)) {
    path.n.push_back(*n);
    path.theta_hat.push_back(expfam::mle(d.family, sum_at(*n), *n));
  }
  return path;
}

StageOutcome run_design(const Design& d, const Thresholds& th, std::span<const double> xs) {
  validate(d);
  validate(th);
  expfam::PrefixSums sums;
  Path path;
  while (auto n = next_look(d, path)) {
    if (xs.size() < *n)
      throw DataError("stream has " + std::to_string(xs.size()) + " observations but stage " +
                      std::to_string(path.n.size() + 1) + " needs " + std::to_string(*n));
    while (sums.size() < *n) {
      const double x = xs[sums.size()];
      if (!std::isfinite(x)) throw DataError("non-finite observation");
      sums.push_back(x);
    }
    const double theta_hat = expfam::mle(d.family, sums.sum(1, *n), *n);
    path.n.push_back(*n);
    path.theta_hat.push_back(theta_hat);
    if (auto out = apply_rules(d, th, static_cast<int>(path.n.size()), *n, theta_hat)) return *out;
  }
  throw NumericError("design ended without a final look");
}

}  // namespace

Path build_path(const Design& d, std::span<const double> xs) {
  validate(d);
  if (xs.size() < final_size(d))
    throw DataError("stream shorter than the final sample size");
  const expfam::PrefixSums sums(xs);
  return path_from(d, [&](std::size_t n) { return sums.sum(1, n); });
}

StageOutcome decide(const Design& d, const Thresholds& th, const Path& path) {
  for (std::size_t k = 0; k < path.n.size(); ++k) {
    if (auto out = apply_rules(d, th, static_cast<int>(k + 1), path.n[k], path.theta_hat[k]))
      return *out;
  }
  throw ConfigError("path has no final look");
}

StageOutcome run_three_stage(const Design& design, const Thresholds& th,
                             std::span<const double> xs) {
  if (design.four_stage) throw ConfigError("design is four-stage");
  return run_design(design, th, xs);
}

StageOutcome run_four_stage(const Design& design, const Thresholds& th,
                            std::span<const double> xs) {
  if (!design.four_stage) throw ConfigError("design is three-stage");
  return run_design(design, th, xs);
}

std::vector<Path> simulate_paths(const Design& d, double theta, std::size_t reps,
                                 std::uint64_t seed, std::uint64_t stream, std::size_t workers) {
  validate(d);
  d.family.require_in_domain(theta);
  std::vector<Path> paths(reps);
  parallel_for(reps, workers, [&](std::size_t r) {
    Rng rng(seed, r, stream);
    double s = 0.0;
    std::size_t drawn = 0;
    paths[r] = path_from(d, [&](std::size_t n) {
      for (; drawn < n; ++drawn) s += d.family.sample(theta, rng);
      return s;
    });
  });
  return paths;
}

namespace {

// Per-look statistics with the side conditions folded in: r is Lambda_{.,0}
// when theta_hat > u0 and -inf otherwise; f is the futility GLR when
// theta_hat < u_f and -inf otherwise.
struct Look {
  double r;
  double f;
  bool final;
};

std::vector<std::vector<Look>> tabulate(const Design& d, std::span<const Path> paths) {
  const double uf = futility_value(d);
  const std::size_t N = final_size(d);
  std::vector<std::vector<Look>> out(paths.size());
  for (std::size_t k = 0; k < paths.size(); ++k) {
    const Path& p = paths[k];
    out[k].reserve(p.n.size());
    for (std::size_t i = 0; i < p.n.size(); ++i) {
      const double th = p.theta_hat[i];
      Look l{-kInf, -kInf, p.n[i] == N};
      if (th > d.u0) l.r = log_glr(d.family, th, p.n[i], d.u0);
      if (th < uf) l.f = log_glr(d.family, th, p.n[i], uf);
      out[k].push_back(l);
    }
  }
  return out;
}

bool futility_any(const std::vector<Look>& looks, double b_tilde) {
  for (const Look& l : looks)
    if (!l.final && l.f >= b_tilde) return true;
  return false;
}

enum class Stop { futility, reject, none };

Stop interim_stop(const std::vector<Look>& looks, double b, double b_tilde) {
  for (const Look& l : looks) {
    if (l.final) break;
    if (l.f >= b_tilde) return Stop::futility;
    if (l.r >= b) return Stop::reject;
  }
  return Stop::none;
}

double final_r(const std::vector<Look>& looks) { return looks.back().r; }

double binomial_se(double p, std::size_t n) {
  return std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(n));
}

// Smallest x >= 0 (to tolerance) with prob(x) <= target, for prob nonincreasing.
double solve_decreasing(const std::function<double(double)>& prob, double target,
                        const char* name) {
  const double p0 = prob(0.0);
  if (!(p0 > target))
    throw ConfigError(std::string("calibration target for ") + name + " unattainable: target " +
                      std::to_string(target) + " but the largest achievable probability is " +
                      std::to_string(p0));
  double lo = 0.0;
  double hi = 1.0;
  int guard = 0;
  while (prob(hi) > target) {
    lo = hi;
    hi *= 2.0;
    if (++guard > 60) throw NumericError(std::string("no upper bracket for ") + name);
  }
  for (int it = 0; it < 200 && hi - lo > 1e-10 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (prob(mid) > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

CalibrationReport calibrate_monte_carlo(const Design& d, const CalibrationSettings& s) {
  if (s.reps < 2) throw ConfigError("reps must be at least 2");
  const auto paths_f = simulate_paths(d, futility_value(d), s.reps, s.seed, 1, s.workers);
  const auto paths_0 = simulate_paths(d, d.u0, s.reps, s.seed, 0, s.workers);
  const auto looks_f = tabulate(d, paths_f);
  const auto looks_0 = tabulate(d, paths_0);
  const double reps = static_cast<double>(s.reps);

  auto p_fut = [&](double bt) {
    std::size_t hits = 0;
    for (const auto& l : looks_f) hits += futility_any(l, bt) ? 1 : 0;
    return static_cast<double>(hits) / reps;
  };
  const double b_tilde = solve_decreasing(p_fut, d.eps_tilde * d.alpha_tilde, "b_tilde");

  auto p_int = [&](double b) {
    std::size_t hits = 0;
    for (const auto& l : looks_0) hits += interim_stop(l, b, b_tilde) == Stop::reject ? 1 : 0;
    return static_cast<double>(hits) / reps;
  };
  const double b = solve_decreasing(p_int, d.eps * d.alpha, "b");

  std::vector<double> survivors;
  for (const auto& l : looks_0)
    if (interim_stop(l, b, b_tilde) == Stop::none) survivors.push_back(final_r(l));
  auto p_fin = [&](double c) {
    std::size_t hits = 0;
    for (double r : survivors) hits += r >= c ? 1 : 0;
    return static_cast<double>(hits) / reps;
  };
  const double c = solve_decreasing(p_fin, (1.0 - d.eps) * d.alpha, "c");

  CalibrationReport rep{{b, b_tilde, c}, p_fut(b_tilde), p_int(b), p_fin(c)};
  rep.se_futility = binomial_se(rep.p_futility, s.reps);
  rep.se_interim_reject = binomial_se(rep.p_interim_reject, s.reps);
  rep.se_final_reject = binomial_se(rep.p_final_reject, s.reps);
  return rep;
}

// Normal approximation: under u(theta) = u, W_n = n sign(theta_hat - u)
// sqrt(2 I(theta_hat, u)) is a Gaussian random walk with unit-variance
// increments (exact for the Gaussian family).
class SignedRootWalk {
 public:
  SignedRootWalk(const Design& d, double u) : d_(d), u_(u) {}

  double w_of_theta(double theta, std::size_t n) const {
    if (theta == kInf) return kInf;
    if (theta == -kInf) return -kInf;
    const double r = static_cast<double>(n) * std::sqrt(2.0 * expfam::kl(d_.family, theta, u_));
    return theta > u_ ? r : (theta < u_ ? -r : 0.0);
  }

  double theta_of_w(double w, std::size_t n) const {
    if (w == 0.0) return u_;
    const double nn = static_cast<double>(n);
    return theta_at_level(u_, w * w / (2.0 * nn * nn), w > 0.0 ? 1 : -1);
  }

  // theta on the given side of center with I(theta, center) = level; +-inf
  // when the level is out of reach inside the natural domain.
  double theta_at_level(double center, double level, int side) const {
    if (level <= 0.0) return center;
    const expfam::Interval dom = d_.family.domain();
    auto gap = [&](double th) { return expfam::kl(d_.family, th, center) - level; };
    double step = 1.0;
    double inner = center;
    double outer = center;
    for (int it = 0;; ++it) {
      double cand = center + side * step;
      if (side > 0 && std::isfinite(dom.hi) && cand >= dom.hi) cand = 0.5 * (outer + dom.hi);
      if (side < 0 && std::isfinite(dom.lo) && cand <= dom.lo) cand = 0.5 * (outer + dom.lo);
      if (gap(cand) >= 0.0) {
        outer = cand;
        break;
      }
      inner = cand;
      outer = cand;
      step *= 2.0;
      if (it > 200) return side > 0 ? kInf : -kInf;
    }
    const double lo = std::min(inner, outer);
    const double hi = std::max(inner, outer);
    return bisect(gap, lo, hi, 1e-15);
  }

  // Smallest W with theta_hat >= theta_level: the region W >= w is the
  // rejection region of the statistic against u0.
  double reject_w(std::size_t n, double threshold) {
    auto key = std::make_pair(n, threshold);
    auto it = reject_cache_.find(key);
    if (it != reject_cache_.end()) return it->second;
    const double th = theta_at_level(d_.u0, threshold / static_cast<double>(n), 1);
    const double w = w_of_theta(th, n);
    reject_cache_.emplace(key, w);
    return w;
  }

  double futility_w(std::size_t n, double threshold) {
    auto key = std::make_pair(n, threshold);
    auto it = futility_cache_.find(key);
    if (it != futility_cache_.end()) return it->second;
    const double uf = futility_value(d_);
    const double th = theta_at_level(uf, threshold / static_cast<double>(n), -1);
    const double w = w_of_theta(th, n);
    futility_cache_.emplace(key, w);
    return w;
  }

  std::size_t n2_of_w(double w) const { return stage2_size(d_, theta_of_w(w, d_.m)); }

 private:
  struct KeyHash {
    std::size_t operator()(const std::pair<std::size_t, double>& k) const {
      return std::hash<std::size_t>()(k.first) ^ (std::hash<double>()(k.second) << 1);
    }
  };
  const Design& d_;
  double u_;
  std::unordered_map<std::pair<std::size_t, double>, double, KeyHash> reject_cache_;
  std::unordered_map<std::pair<std::size_t, double>, double, KeyHash> futility_cache_;
};

double normal_density(double x, double mean, double var) {
  const double z = x - mean;
  return std::exp(-0.5 * z * z / var) / std::sqrt(2.0 * M_PI * var);
}

// P(lo < W < hi) for W ~ N(mean, var).
double normal_mass(double lo, double hi, double mean, double var) {
  if (!(hi > lo)) return 0.0;
  const double s = std::sqrt(var);
  return normal_sf((lo - mean) / s) - normal_sf((hi - mean) / s);
}

// Composite Simpson integral of f(x) N(x; mean, var) over (lo, hi), clipped
// to mean +- sd_span standard deviations.
template <class F>
double integrate_normal(F&& f, double lo, double hi, double mean, double var, std::size_t points,
                        double sd_span) {
  const double s = std::sqrt(var);
  lo = std::max(lo, mean - sd_span * s);
  hi = std::min(hi, mean + sd_span * s);
  if (!(hi > lo)) return 0.0;
  std::size_t k = std::max<std::size_t>(points, 2);
  if (k % 2 == 1) ++k;
  const double h = (hi - lo) / static_cast<double>(k);
  double acc = 0.0;
  for (std::size_t i = 0; i <= k; ++i) {
    const double x = lo + h * static_cast<double>(i);
    const double w = (i == 0 || i == k) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    acc += w * f(x) * normal_density(x, mean, var);
  }
  return acc * h / 3.0;
}

CalibrationReport calibrate_normal(const Design& d, const CalibrationSettings& s) {
  if (d.four_stage) throw ConfigError("normal approximation supports the three-stage design only");
  if (s.grid_points < 2) throw ConfigError("grid_points must be at least 2");
  if (!(s.grid_sd > 0.0)) throw ConfigError("grid_sd must be positive");
  const std::size_t m = d.m;
  const std::size_t M = d.M;
  const double vm = static_cast<double>(m);
  SignedRootWalk walk_f(d, d.u1);
  SignedRootWalk walk_0(d, d.u0);

  auto p_fut = [&](double bt) {
    const double wf1 = walk_f.futility_w(m, bt);
    double p = normal_mass(-kInf, wf1, 0.0, vm);
    p += integrate_normal(
        [&](double w1) {
          const std::size_t n2 = walk_f.n2_of_w(w1);
          if (n2 >= M || n2 == m) return 0.0;
          const double var = static_cast<double>(n2 - m);
          return normal_mass(-kInf, walk_f.futility_w(n2, bt), w1, var);
        },
        wf1, kInf, 0.0, vm, s.grid_points, s.grid_sd);
    return p;
  };
  const double b_tilde = solve_decreasing(p_fut, d.eps_tilde * d.alpha_tilde, "b_tilde");

  auto p_int = [&](double b) {
    const double wf1 = walk_0.futility_w(m, b_tilde);
    const double wr1 = walk_0.reject_w(m, b);
    double p = normal_mass(std::max(wf1, wr1), kInf, 0.0, vm);
    p += integrate_normal(
        [&](double w1) {
          const std::size_t n2 = walk_0.n2_of_w(w1);
          if (n2 >= M || n2 == m) return 0.0;
          const double var = static_cast<double>(n2 - m);
          const double lo = std::max(walk_0.futility_w(n2, b_tilde), walk_0.reject_w(n2, b));
          return normal_mass(lo, kInf, w1, var);
        },
        wf1, wr1, 0.0, vm, s.grid_points, s.grid_sd);
    return p;
  };
  const double b = solve_decreasing(p_int, d.eps * d.alpha, "b");

  auto p_fin = [&](double c) {
    const double wc = walk_0.reject_w(M, c);
    const double wf1 = walk_0.futility_w(m, b_tilde);
    const double wr1 = walk_0.reject_w(m, b);
    return integrate_normal(
        [&](double w1) {
          const std::size_t n2 = walk_0.n2_of_w(w1);
          if (n2 >= M) return normal_mass(wc, kInf, w1, static_cast<double>(M - m));
          const double tail_var = static_cast<double>(M - n2);
          auto final_tail = [&](double w2) { return normal_sf((wc - w2) / std::sqrt(tail_var)); };
          if (n2 == m) return final_tail(w1);
          const double lo = walk_0.futility_w(n2, b_tilde);
          const double hi = walk_0.reject_w(n2, b);
          return integrate_normal(final_tail, lo, hi, w1, static_cast<double>(n2 - m),
                                  s.grid_points, s.grid_sd);
        },
        wf1, wr1, 0.0, vm, s.grid_points, s.grid_sd);
  };
  const double c = solve_decreasing(p_fin, (1.0 - d.eps) * d.alpha, "c");
  return {{b, b_tilde, c}, p_fut(b_tilde), p_int(b), p_fin(c)};
}

}  // namespace

CalibrationReport calibrate_thresholds(const Design& design, const CalibrationSettings& settings) {
  validate(design);
  if (settings.method == CalibrationMethod::normal_approx) return calibrate_normal(design, settings);
  return calibrate_monte_carlo(design, settings);
}

EventProbabilities event_probabilities(const Design& d, const Thresholds& th,
                                       std::span<const Path> paths) {
  if (paths.empty()) throw ConfigError("no paths supplied");
  const auto looks = tabulate(d, paths);
  std::size_t fut_any = 0;
  std::size_t int_rej = 0;
  std::size_t fin_rej = 0;
  std::size_t fut_stop = 0;
  for (const auto& l : looks) {
    if (futility_any(l, th.b_tilde)) ++fut_any;
    const Stop stop = interim_stop(l, th.b, th.b_tilde);
    if (stop == Stop::reject) ++int_rej;
    if (stop == Stop::futility) ++fut_stop;
    if (stop == Stop::none && final_r(l) >= th.c) ++fin_rej;
  }
  const double n = static_cast<double>(paths.size());
  return {fut_any / n, int_rej / n, fin_rej / n, (int_rej + fin_rej) / n, fut_stop / n};
}

std::vector<OperatingPoint> operating_characteristics(const Design& d, const Thresholds& th,
                                                      std::span<const double> thetas,
                                                      std::size_t reps, std::uint64_t seed,
                                                      std::size_t workers) {
  validate(d);
  validate(th);
  if (reps < 2) throw ConfigError("reps must be at least 2");
  const std::size_t stages = d.four_stage ? 4 : 3;
  std::vector<OperatingPoint> out;
  for (std::size_t k = 0; k < thetas.size(); ++k) {
    const auto paths = simulate_paths(d, thetas[k], reps, seed, 100 + k, workers);
    Welford power;
    Welford size;
    std::vector<double> freq(stages, 0.0);
    for (const Path& p : paths) {
      const StageOutcome o = decide(d, th, p);
      power.add(o.reject ? 1.0 : 0.0);
      size.add(static_cast<double>(o.n_total));
      freq[static_cast<std::size_t>(o.stage - 1)] += 1.0;
    }
    for (double& f : freq) f /= static_cast<double>(reps);
    out.push_back({thetas[k], power.mean(), power.std_error(), size.mean(), size.std_error(),
                   std::move(freq), reps});
  }
  return out;
}

StageOutcome run_group_2sprt(const Family& family, double theta, double theta0, double theta1,
                             double b, double b_tilde, std::span<const std::size_t> groups,
                             std::span<const double> xs) {
  family.require_in_domain(theta);
  family.require_in_domain(theta0);
  family.require_in_domain(theta1);
  if (groups.empty()) throw ConfigError("at least one group size is required");
  if (groups.front() < 1) throw ConfigError("group sizes must be positive");
  for (std::size_t k = 1; k < groups.size(); ++k)
    if (!(groups[k] > groups[k - 1])) throw ConfigError("group sizes must be increasing");
  if (std::isnan(b) || std::isnan(b_tilde)) throw ConfigError("thresholds must not be NaN");
  double s = 0.0;
  std::size_t used = 0;
  for (std::size_t k = 0; k < groups.size(); ++k) {
    const std::size_t n = groups[k];
    if (xs.size() < n)
      throw DataError("stream has " + std::to_string(xs.size()) + " observations but group " +
                      std::to_string(k + 1) + " needs " + std::to_string(n));
    for (; used < n; ++used) {
      if (!std::isfinite(xs[used])) throw DataError("non-finite observation");
      s += xs[used];
    }
    const double nn = static_cast<double>(n);
    const int stage = static_cast<int>(k + 1);
    if (k + 1 < groups.size()) {
      const double l0 = (theta - theta0) * s - nn * (family.b(theta) - family.b(theta0));
      const double l1 = (theta - theta1) * s - nn * (family.b(theta) - family.b(theta1));
      if (l0 >= b) return {stage, n, true, Trigger::interim_reject};
      if (l1 >= b_tilde) return {stage, n, false, Trigger::futility};
    } else {
      const double lr = (theta1 - theta0) * s - nn * (family.b(theta1) - family.b(theta0));
      return {stage, n, lr > 0.0, Trigger::final_test};
    }
  }
  throw NumericError("group sequence ended without a decision");
}

Thma1Reference thma1_reference(std::span<const std::size_t> groups, double alpha, double beta,
                               double theta, const Family& family, double theta0, double theta1,
                               double eps) {
  require_probability(alpha, "alpha");
  require_probability(beta, "beta");
  if (!(eps >= 0.0 && eps < 1.0)) throw ConfigError("eps must lie in [0, 1)");
  if (groups.empty()) throw ConfigError("at least one group size is required");
  family.require_in_domain(theta);
  const double m = std::min(info_or_inf(std::abs(std::log(alpha)), expfam::kl(family, theta, theta0)),
                            info_or_inf(std::abs(std::log(beta)), expfam::kl(family, theta, theta1)));
  std::size_t nu = groups.size();
  for (std::size_t k = 0; k < groups.size(); ++k) {
    if (static_cast<double>(groups[k]) >= (1.0 - eps) * m) {
      nu = k + 1;
      break;
    }
  }
  return {nu, m};
}

}  // namespace seqlab::groupseq
