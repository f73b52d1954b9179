#include "seqlab/bcmix.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "seqlab/errors.hpp"
#include "seqlab/io.hpp"
#include "seqlab/numeric.hpp"

namespace seqlab::bcmix {

void validate(const HyperParams& hp) {
  if (!(hp.p > 0.0 && hp.p < 1.0)) throw ConfigError("change frequency p must lie in (0, 1)");
  if (!(hp.a0 > 0.0) || !std::isfinite(hp.a0)) throw ConfigError("a0 must be positive");
  if (!std::isfinite(hp.mu0) || !hp.family.mean_domain().contains(hp.mu0)) {
    throw DomainError("mu0 must lie inside the mean domain of the family");
  }
}

double log_pi00(const HyperParams& hp) { return hp.family.log_normalizer(hp.a0, hp.mu0); }

double log_pi_of(const HyperParams& hp, double seg_sum, double seg_count) {
  return expfam::log_pi_segment(hp.family, hp.a0, hp.mu0, seg_sum, seg_count);
}

double segment_mean(const HyperParams& hp, double seg_sum, double seg_count) {
  return (hp.a0 * hp.mu0 + seg_sum) / (hp.a0 + seg_count);
}

namespace {

void normalize(WeightSet& ws) {
  std::vector<double> lw(ws.entries.size());
  for (std::size_t k = 0; k < lw.size(); ++k) lw[k] = ws.entries[k].log_weight;
  const double total = log_sum_exp(lw);
  if (!std::isfinite(total)) throw NumericError("filter weights are not finite");
  for (auto& e : ws.entries) e.log_weight -= total;
}

WeightSet step_core(const HyperParams& hp, const WeightSet& prev, double x, std::size_t t,
                    Direction dir) {
  if (!std::isfinite(x)) throw DataError("non-finite observation at t=" + std::to_string(t));
  WeightSet out;
  out.t = t;
  out.direction = dir;
  out.entries.reserve(prev.entries.size() + 1);
  const double log_stay = std::log1p(-hp.p);
  for (const auto& e : prev.entries) {
    WeightEntry n{e.index, 0.0, e.seg_sum + x, e.seg_count + 1.0, 0.0};
    n.log_pi = log_pi_of(hp, n.seg_sum, n.seg_count);
    n.log_weight = log_stay + e.log_weight + e.log_pi - n.log_pi;
    out.entries.push_back(n);
  }
  WeightEntry fresh{t, 0.0, x, 1.0, log_pi_of(hp, x, 1.0)};
  fresh.log_weight = std::log(hp.p) + log_pi00(hp) - fresh.log_pi;
  out.entries.push_back(fresh);
  for (const auto& e : out.entries) {
    if (!std::isfinite(e.log_pi)) throw NumericError("segment normaliser is not finite");
  }
  std::vector<double> lw(out.entries.size());
  for (std::size_t k = 0; k < lw.size(); ++k) lw[k] = out.entries[k].log_weight;
  out.log_mass = log_sum_exp(lw);
  normalize(out);
  return out;
}

}  // namespace

WeightSet forward_step(const HyperParams& hp, const WeightSet& prev, double x) {
  if (prev.direction != Direction::forward && !prev.entries.empty()) {
    throw ConfigError("forward_step needs a forward weight set");
  }
  return step_core(hp, prev, x, prev.t + 1, Direction::forward);
}

WeightSet backward_step(const HyperParams& hp, const WeightSet& next, double x) {
  if (next.direction != Direction::backward && !next.entries.empty()) {
    throw ConfigError("backward_step needs a backward weight set");
  }
  if (next.t < 2) throw ConfigError("backward filter starts from an empty set with t = n + 1");
  return step_core(hp, next, x, next.t - 1, Direction::backward);
}

void bcmix_prune(WeightSet& weights, std::size_t m, std::size_t M) {
  if (m >= M) throw ConfigError("BCMIX requires m < M");
  if (weights.entries.size() <= M) return;
  const std::size_t t = weights.t;
  std::size_t victim = weights.entries.size();
  for (std::size_t k = 0; k < weights.entries.size(); ++k) {
    const std::size_t idx = weights.entries[k].index;
    const std::size_t age = idx > t ? idx - t : t - idx;
    if (age < m) continue;
    if (victim == weights.entries.size() ||
        weights.entries[k].log_weight < weights.entries[victim].log_weight) {
      victim = k;
    }
  }
  if (victim == weights.entries.size()) return;
  weights.entries.erase(weights.entries.begin() + static_cast<std::ptrdiff_t>(victim));
  normalize(weights);
}

FilterEstimate filter_estimates(const HyperParams& hp, const WeightSet& weights) {
  FilterEstimate est{0.0, 0.0};
  for (const auto& e : weights.entries) {
    const double w = std::exp(e.log_weight);
    if (e.index == weights.t) est.change_prob = w;
    est.posterior_mean += w * segment_mean(hp, e.seg_sum, e.seg_count);
  }
  return est;
}

std::vector<WeightSet> forward_filter(const HyperParams& hp, std::span<const double> xs,
                                      const std::optional<PruneOptions>& prune) {
  validate(hp);
  if (prune && prune->m >= prune->M) throw ConfigError("BCMIX requires m < M");
  std::vector<WeightSet> out;
  out.reserve(xs.size());
  WeightSet cur;
  for (double x : xs) {
    cur = forward_step(hp, cur, x);
    if (prune) bcmix_prune(cur, prune->m, prune->M);
    out.push_back(cur);
  }
  return out;
}

std::vector<WeightSet> backward_filter(const HyperParams& hp, std::span<const double> xs,
                                       const std::optional<PruneOptions>& prune) {
  validate(hp);
  if (prune && prune->m >= prune->M) throw ConfigError("BCMIX requires m < M");
  std::vector<WeightSet> out(xs.size());
  WeightSet cur;
  cur.direction = Direction::backward;
  cur.t = xs.size() + 1;
  for (std::size_t t = xs.size(); t >= 1; --t) {
    cur = backward_step(hp, cur, xs[t - 1]);
    if (prune) bcmix_prune(cur, prune->m, prune->M);
    out[t - 1] = cur;
  }
  return out;
}

WeightSet closed_form_weights(const HyperParams& hp, std::span<const double> xs, std::size_t t) {
  validate(hp);
  if (t < 1 || t > xs.size()) throw ConfigError("time index out of range");
  const expfam::PrefixSums sums(xs.first(t));
  WeightSet out;
  out.t = t;
  const double lp = std::log(hp.p);
  const double lq = std::log1p(-hp.p);
  const double l00 = log_pi00(hp);
  for (std::size_t i = 1; i <= t; ++i) {
    const double s = sums.sum(i, t);
    const double cnt = static_cast<double>(t - i + 1);
    WeightEntry e{i, 0.0, s, cnt, log_pi_of(hp, s, cnt)};
    e.log_weight = lp + static_cast<double>(t - i) * lq + l00 - e.log_pi;
    out.entries.push_back(e);
  }
  normalize(out);
  return out;
}

SmootherWeights smooth(const HyperParams& hp, const WeightSet& forward,
                       const WeightSet* backward) {
  SmootherWeights out;
  out.t = forward.t;
  if (backward == nullptr) {
    for (const auto& e : forward.entries) {
      out.entries.push_back({e.index, forward.t, e.log_weight, e.seg_sum, e.seg_count});
    }
    return out;
  }
  if (backward->t != forward.t + 1 || backward->direction != Direction::backward ||
      forward.direction != Direction::forward) {
    throw ConfigError("smoother needs forward weights at t and backward weights at t+1");
  }
  const double lp = std::log(hp.p);
  const double lq = std::log1p(-hp.p);
  const double l00 = log_pi00(hp);
  std::vector<double> terms;
  terms.reserve(forward.entries.size() * (backward->entries.size() + 1) + 1);
  terms.push_back(lp);
  for (const auto& f : forward.entries) {
    out.entries.push_back({f.index, forward.t, lp + f.log_weight, f.seg_sum, f.seg_count});
    for (const auto& b : backward->entries) {
      const double s = f.seg_sum + b.seg_sum;
      const double c = f.seg_count + b.seg_count;
      const double lb = lq + f.log_weight + b.log_weight + f.log_pi + b.log_pi -
                        log_pi_of(hp, s, c) - l00;
      out.entries.push_back({f.index, b.index, lb, s, c});
      terms.push_back(lb);
    }
  }
  out.log_pstar = log_sum_exp(terms);
  if (!std::isfinite(out.log_pstar)) throw NumericError("smoother normaliser is not finite");
  for (auto& e : out.entries) e.log_beta -= out.log_pstar;
  return out;
}

std::vector<SmoothEstimate> smooth_estimates(const HyperParams& hp,
                                             std::span<const WeightSet> forward,
                                             std::span<const WeightSet> backward) {
  if (forward.size() != backward.size()) throw ConfigError("filter lengths differ");
  const std::size_t n = forward.size();
  std::vector<SmoothEstimate> out(n);
  double prev_log_pstar = 0.0;
  for (std::size_t t = 1; t <= n; ++t) {
    const double change = t == 1 ? 1.0 : std::exp(std::log(hp.p) - prev_log_pstar);
    if (t == n) {
      const FilterEstimate f = filter_estimates(hp, forward[n - 1]);
      out[t - 1] = {f.change_prob, f.posterior_mean};
      break;
    }
    const SmootherWeights sw = smooth(hp, forward[t - 1], &backward[t]);
    double mean = 0.0;
    for (const auto& e : sw.entries) {
      mean += std::exp(e.log_beta) * segment_mean(hp, e.seg_sum, e.seg_count);
    }
    out[t - 1] = {change, mean};
    prev_log_pstar = sw.log_pstar;
  }
  return out;
}

std::vector<SmoothEstimate> smoother(const HyperParams& hp, std::span<const double> xs,
                                     const std::optional<PruneOptions>& prune) {
  const auto fwd = forward_filter(hp, xs, prune);
  const auto bwd = backward_filter(hp, xs, prune);
  return smooth_estimates(hp, fwd, bwd);
}

ExtendedShiryaev::ExtendedShiryaev(const HyperParams& hp, std::size_t k)
    : hp_(hp), k_(k), log_pi00_(log_pi00(hp)) {
  validate(hp);
}

void ExtendedShiryaev::push(double x) {
  if (!std::isfinite(x)) throw DataError("non-finite observation");
  sums_.push_back(x);
}

double ExtendedShiryaev::log_statistic() const {
  const std::size_t n = sums_.size();
  if (n == 0) return -kInf;
  const std::size_t lo = n > k_ ? n - k_ : 1;
  const double lq = std::log1p(-hp_.p);
  const double l1n = expfam::log_pi(hp_.family, hp_.a0, hp_.mu0, 1, n, sums_);
  std::vector<double> terms;
  terms.reserve(n - lo + 1);
  for (std::size_t i = lo; i <= n; ++i) {
    const double l1i = expfam::log_pi(hp_.family, hp_.a0, hp_.mu0, 1, i - 1, sums_);
    const double lin = expfam::log_pi(hp_.family, hp_.a0, hp_.mu0, i, n, sums_);
    terms.push_back(log_pi00_ + l1n - static_cast<double>(n - i + 1) * lq - l1i - lin);
  }
  return log_sum_exp(terms);
}

double ExtendedShiryaev::statistic() const { return std::exp(log_statistic()); }

std::optional<Alarm> extended_shiryaev(const HyperParams& hp, std::size_t n0, std::size_t k,
                                       double gamma, std::span<const double> xs) {
  if (n0 < 1) throw ConfigError("n0 must be at least 1");
  if (!(gamma >= 0.0)) throw ConfigError("gamma must be nonnegative");
  ExtendedShiryaev rule(hp, k);
  const double lg = gamma > 0.0 ? std::log(gamma) : -kInf;
  for (double x : xs) {
    rule.push(x);
    if (rule.n() <= n0) continue;
    const double ls = rule.log_statistic();
    if (ls >= lg) return Alarm{rule.n(), std::exp(ls)};
  }
  return std::nullopt;
}

double window_mass(const WeightSet& weights, std::size_t k) {
  const std::size_t lo = weights.t > k ? weights.t - k : 0;
  double total = 0.0;
  for (const auto& e : weights.entries) {
    if (e.index >= lo) total += std::exp(e.log_weight);
  }
  return total;
}

std::optional<Alarm> mcp_surveil(const HyperParams& hp, std::size_t k, double gamma,
                                 std::size_t n0, std::span<const double> xs,
                                 const PruneOptions& prune) {
  validate(hp);
  if (prune.m >= prune.M) throw ConfigError("BCMIX requires m < M");
  WeightSet cur;
  for (double x : xs) {
    cur = forward_step(hp, cur, x);
    bcmix_prune(cur, prune.m, prune.M);
    if (cur.t <= n0) continue;
    const double s = window_mass(cur, k);
    if (s >= gamma) return Alarm{cur.t, s};
  }
  return std::nullopt;
}

std::size_t suggest_window(double p, double info, double slack) {
  if (!(p > 0.0 && p < 1.0)) throw ConfigError("p must lie in (0, 1)");
  if (!(info > 0.0)) throw ConfigError("information must be positive");
  return static_cast<std::size_t>(std::ceil(slack * std::abs(std::log(p)) / info));
}

double log_likelihood(const HyperParams& hp, std::span<const double> xs,
                      const std::optional<PruneOptions>& prune) {
  validate(hp);
  if (prune && prune->m >= prune->M) throw ConfigError("BCMIX requires m < M");
  WeightSet cur;
  double ll = -std::log(hp.p);
  for (double x : xs) {
    cur = forward_step(hp, cur, x);
    ll += cur.log_mass + hp.family.log_base(x);
    if (prune) bcmix_prune(cur, prune->m, prune->M);
  }
  return xs.empty() ? 0.0 : ll;
}

std::vector<double> default_p_grid(std::size_t n) {
  std::vector<double> grid;
  for (double v = 1.0; v <= static_cast<double>(n) / 10.0; v *= 2.0) {
    grid.push_back(v / static_cast<double>(n));
  }
  return grid;
}

FitResult fit_hyperparams(const expfam::Family& family, std::span<const double> xs,
                          const FitOptions& options) {
  if (xs.size() < 10) throw ConfigError("fit_hyperparams needs at least 10 observations");
  FitResult out;
  out.grid = options.grid.empty() ? default_p_grid(xs.size()) : options.grid;
  if (out.grid.empty()) throw ConfigError("p grid is empty");
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  std::vector<double> grid = out.grid;
  std::sort(grid.begin(), grid.end());
  out.grid = grid;
  HyperParams best{grid.front(), options.a0, mean, family};
  double best_ll = -kInf;
  for (double p : grid) {
    HyperParams hp{p, options.a0, mean, family};
    const double ll = log_likelihood(hp, xs, options.prune);
    out.log_lik.push_back(ll);
    if (ll > best_ll) {
      best_ll = ll;
      best = hp;
    }
  }
  out.params = best;
  return out;
}

void save_snapshot(std::ostream& out, const HyperParams& hp, const WeightSet& weights) {
  out << "seqlab-weightset v1 t=" << weights.t << " p=" << io::format_double(hp.p, 17)
      << " a0=" << io::format_double(hp.a0, 17) << " mu0=" << io::format_double(hp.mu0, 17)
      << " family=" << hp.family.name()
      << " direction=" << (weights.direction == Direction::forward ? "forward" : "backward")
      << '\n';
  for (const auto& e : weights.entries) {
    out << e.index << ',' << io::format_double(e.log_weight, 17) << ','
        << io::format_double(e.seg_sum, 17) << ',' << io::format_double(e.seg_count, 17) << '\n';
  }
}

std::pair<HyperParams, WeightSet> load_snapshot(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw DataError("empty snapshot");
  std::istringstream hs(header);
  std::string magic;
  std::string version;
  hs >> magic >> version;
  if (magic != "seqlab-weightset" || version != "v1") {
    throw DataError("line 1: not a seqlab-weightset v1 snapshot");
  }
  std::map<std::string, std::string> fields;
  std::string tok;
  while (hs >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) throw DataError("line 1: malformed header field '" + tok + "'");
    fields[tok.substr(0, eq)] = tok.substr(eq + 1);
  }
  for (const char* key : {"t", "p", "a0", "mu0", "family"}) {
    if (!fields.count(key)) throw DataError(std::string("line 1: missing header field ") + key);
  }
  HyperParams hp;
  hp.p = io::parse_double(fields["p"], 1);
  hp.a0 = io::parse_double(fields["a0"], 1);
  hp.mu0 = io::parse_double(fields["mu0"], 1);
  try {
    hp.family = expfam::Family::from_name(fields["family"]);
  } catch (const ConfigError& e) {
    throw DataError(std::string("line 1: ") + e.what());
  }
  WeightSet ws;
  ws.t = static_cast<std::size_t>(io::parse_double(fields["t"], 1));
  ws.direction = fields.count("direction") && fields["direction"] == "backward"
                     ? Direction::backward
                     : Direction::forward;
  std::string text;
  std::size_t line = 1;
  while (std::getline(in, text)) {
    ++line;
    if (text.empty()) continue;
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) parts.push_back(part);
    if (parts.size() != 4) throw DataError("line " + std::to_string(line) + ": expected 4 fields");
    WeightEntry e{};
    e.index = static_cast<std::size_t>(io::parse_double(parts[0], line));
    e.log_weight = io::parse_double(parts[1], line);
    e.seg_sum = io::parse_double(parts[2], line);
    e.seg_count = io::parse_double(parts[3], line);
    e.log_pi = log_pi_of(hp, e.seg_sum, e.seg_count);
    ws.entries.push_back(e);
  }
  validate(hp);
  return {hp, ws};
}

}  // namespace seqlab::bcmix
