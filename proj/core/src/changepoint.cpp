#include "seqlab/changepoint.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "seqlab/errors.hpp"
#include "seqlab/numeric.hpp"

namespace seqlab::cpd {

CusumState cusum_update(CusumState state, double z) {
  state.w = std::max(state.w + z, 0.0);
  ++state.n;
  return state;
}

double cusum_threshold(double gamma) {
  if (!(gamma >= 1.0)) throw ConfigError("gamma must be at least 1");
  return std::log(gamma);
}

SrState sr_update(SrState state, double z) {
  if (!(state.p >= 0.0 && state.p < 1.0)) throw ConfigError("p must lie in [0, 1)");
  state.r = (1.0 + state.r) * std::exp(z) / (1.0 - state.p);
  ++state.n;
  return state;
}

double wl_threshold(double alpha, std::size_t m) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  if (m < 1) throw ConfigError("window must be at least 1");
  return std::log(2.0 * static_cast<double>(m) / alpha);
}

std::size_t window_size(double alpha, double info, double slack) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  if (!(info > 0.0)) throw ConfigError("information must be positive");
  if (!(slack >= 1.0)) throw ConfigError("slack must be at least 1");
  // Guard against ceil() bumping an exact integer up through rounding noise.
  const double v = slack * std::abs(std::log(alpha)) / info;
  const double r = std::round(v);
  const double m = std::abs(v - r) <= 1e-12 * std::max(1.0, r) ? r : std::ceil(v);
  return std::max<std::size_t>(1, static_cast<std::size_t>(m));
}

double isolation_threshold(std::size_t hypotheses, double alpha) {
  if (hypotheses < 2) throw ConfigError("detection-isolation needs at least 2 hypotheses");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  return std::log(2.0 * static_cast<double>(hypotheses) / alpha);
}

WindowCusum::WindowCusum(std::size_t m) : m_(m) {
  if (m < 1) throw ConfigError("window must be at least 1");
}

void WindowCusum::reset() {
  n_ = 0;
  acc_.clear();
}

void WindowCusum::push(double z) {
  for (double& a : acc_) a += z;
  acc_.push_back(z);
  ++n_;
  if (acc_.size() > m_ + 1) acc_.pop_front();
}

double WindowCusum::statistic() const {
  double best = -kInf;
  for (double a : acc_) best = std::max(best, a);
  return best;
}

WindowMixture::WindowMixture(std::size_t m, std::span<const double> weights) : m_(m) {
  if (m < 1) throw ConfigError("window must be at least 1");
  if (weights.empty()) throw ConfigError("mixture grid is empty");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw ConfigError("mixture weights must be nonnegative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ConfigError("mixture weights must sum to 1");
  for (double w : weights) log_w_.push_back(std::log(w));
}

void WindowMixture::reset() {
  n_ = 0;
  acc_.clear();
}

void WindowMixture::push(std::span<const double> z) {
  if (z.size() != log_w_.size()) throw DataError("mixture increment count mismatch");
  for (auto& a : acc_) {
    for (std::size_t k = 0; k < a.size(); ++k) a[k] += z[k];
  }
  acc_.emplace_back(z.begin(), z.end());
  ++n_;
  if (acc_.size() > m_ + 1) acc_.pop_front();
}

double WindowMixture::statistic() const {
  double best = -kInf;
  std::vector<double> terms(log_w_.size());
  for (const auto& a : acc_) {
    for (std::size_t k = 0; k < a.size(); ++k) terms[k] = log_w_[k] + a[k];
    best = std::max(best, log_sum_exp(terms));
  }
  return best;
}

DetectIsolate::DetectIsolate(std::size_t hypotheses, std::size_t m)
    : hyp_(hypotheses), m_(m), maxima_(hypotheses, -kInf) {
  if (hypotheses < 2) throw ConfigError("detection-isolation needs at least 2 hypotheses");
  if (m < 1) throw ConfigError("window must be at least 1");
}

void DetectIsolate::reset() {
  n_ = 0;
  acc_.clear();
  std::fill(maxima_.begin(), maxima_.end(), -kInf);
}

void DetectIsolate::push(std::span<const double> z) {
  if (z.size() != hyp_) throw DataError("isolation increment count mismatch");
  for (auto& a : acc_) {
    for (std::size_t i = 0; i < hyp_; ++i) a[i] += z[i];
  }
  acc_.emplace_back(z.begin(), z.end());
  ++n_;
  if (acc_.size() > m_ + 1) acc_.pop_front();
  std::fill(maxima_.begin(), maxima_.end(), -kInf);
  for (const auto& a : acc_) {
    for (std::size_t i = 0; i < hyp_; ++i) maxima_[i] = std::max(maxima_[i], a[i]);
  }
}

double DetectIsolate::statistic() const {
  double best = -kInf;
  for (std::size_t i = 0; i < hyp_; ++i) {
    double rival = 0.0;
    for (std::size_t l = 0; l < hyp_; ++l) {
      if (l != i) rival = std::max(rival, maxima_[l]);
    }
    best = std::max(best, maxima_[i] - rival);
  }
  return best;
}

std::size_t DetectIsolate::decision() const {
  std::size_t d = 0;
  for (std::size_t i = 1; i < hyp_; ++i) {
    if (maxima_[i] > maxima_[d]) d = i;
  }
  return d + 1;
}

std::optional<Alarm> run_detect_isolate(std::size_t hypotheses, std::size_t m, double a,
                                        std::span<const std::vector<double>> increments) {
  DetectIsolate rule(hypotheses, m);
  for (const auto& z : increments) {
    rule.push(z);
    const double s = rule.statistic();
    if (s >= a) return Alarm{rule.n(), s, rule.decision()};
  }
  return std::nullopt;
}

DetectorKind detector_kind_from_name(const std::string& name) {
  if (name == "cusum") return DetectorKind::cusum;
  if (name == "sr") return DetectorKind::sr;
  if (name == "shiryaev") return DetectorKind::shiryaev;
  if (name == "wl-cusum" || name == "wl_cusum") return DetectorKind::wl_cusum;
  if (name == "wl-mix" || name == "wl_mix") return DetectorKind::wl_mix;
  throw ConfigError("unknown detector '" + name + "'");
}

void validate(const DetectorSpec& spec) {
  spec.family.require_in_domain(spec.theta0);
  if (!std::isfinite(spec.threshold)) throw ConfigError("threshold must be finite");
  switch (spec.kind) {
    case DetectorKind::cusum:
      spec.family.require_in_domain(spec.theta1);
      break;
    case DetectorKind::sr:
    case DetectorKind::shiryaev:
      spec.family.require_in_domain(spec.theta1);
      if (spec.kind == DetectorKind::shiryaev && !(spec.p > 0.0 && spec.p < 1.0)) {
        throw ConfigError("shiryaev requires p in (0, 1)");
      }
      if (!(spec.r0 >= 0.0)) throw ConfigError("head start r0 must be nonnegative");
      break;
    case DetectorKind::wl_cusum:
      spec.family.require_in_domain(spec.theta1);
      if (spec.m < 1) throw ConfigError("window m must be at least 1");
      break;
    case DetectorKind::wl_mix:
      if (spec.m < 1) throw ConfigError("window m must be at least 1");
      if (spec.grid.empty()) throw ConfigError("mixture grid is empty");
      if (spec.grid.size() != spec.weights.size()) {
        throw ConfigError("mixture grid and weights differ in length");
      }
      for (double th : spec.grid) spec.family.require_in_domain(th);
      break;
  }
}

namespace {

class CusumDetector final : public Detector {
 public:
  explicit CusumDetector(const DetectorSpec& s) : spec_(s) {}
  void reset() override { state_ = {}; }
  bool step(double x) override {
    state_ = cusum_update(state_, expfam::log_density_ratio(spec_.family, spec_.theta1,
                                                            spec_.theta0, x));
    return state_.w >= spec_.threshold;
  }
  double statistic() const override { return state_.w; }

 private:
  DetectorSpec spec_;
  CusumState state_;
};

class SrDetector final : public Detector {
 public:
  explicit SrDetector(const DetectorSpec& s) : spec_(s) { reset(); }
  void reset() override {
    state_ = {};
    state_.r = spec_.r0;
    state_.p = spec_.kind == DetectorKind::shiryaev ? spec_.p : 0.0;
  }
  bool step(double x) override {
    state_ = sr_update(state_, expfam::log_density_ratio(spec_.family, spec_.theta1,
                                                         spec_.theta0, x));
    return state_.r >= spec_.threshold;
  }
  double statistic() const override { return state_.r; }

 private:
  DetectorSpec spec_;
  SrState state_;
};

class WindowCusumDetector final : public Detector {
 public:
  explicit WindowCusumDetector(const DetectorSpec& s) : spec_(s), rule_(s.m) {}
  void reset() override { rule_.reset(); }
  bool step(double x) override {
    rule_.push(expfam::log_density_ratio(spec_.family, spec_.theta1, spec_.theta0, x));
    return rule_.ready() && rule_.statistic() >= spec_.threshold;
  }
  double statistic() const override { return rule_.statistic(); }

 private:
  DetectorSpec spec_;
  WindowCusum rule_;
};

class WindowMixtureDetector final : public Detector {
 public:
  explicit WindowMixtureDetector(const DetectorSpec& s)
      : spec_(s), rule_(s.m, s.weights), z_(s.grid.size()) {}
  void reset() override { rule_.reset(); }
  bool step(double x) override {
    for (std::size_t k = 0; k < z_.size(); ++k) {
      z_[k] = expfam::log_density_ratio(spec_.family, spec_.grid[k], spec_.theta0, x);
    }
    rule_.push(z_);
    return rule_.ready() && rule_.statistic() >= spec_.threshold;
  }
  double statistic() const override { return rule_.statistic(); }

 private:
  DetectorSpec spec_;
  WindowMixture rule_;
  std::vector<double> z_;
};

}  // namespace

std::unique_ptr<Detector> make_detector(const DetectorSpec& spec) {
  validate(spec);
  switch (spec.kind) {
    case DetectorKind::cusum: return std::make_unique<CusumDetector>(spec);
    case DetectorKind::sr:
    case DetectorKind::shiryaev: return std::make_unique<SrDetector>(spec);
    case DetectorKind::wl_cusum: return std::make_unique<WindowCusumDetector>(spec);
    case DetectorKind::wl_mix: return std::make_unique<WindowMixtureDetector>(spec);
  }
  throw ConfigError("unknown detector kind");
}

std::optional<Alarm> first_alarm(Detector& detector, std::span<const double> xs) {
  detector.reset();
  for (std::size_t t = 0; t < xs.size(); ++t) {
    if (!std::isfinite(xs[t])) throw DataError("non-finite observation at t=" + std::to_string(t + 1));
    if (detector.step(xs[t])) return Alarm{t + 1, detector.statistic(), std::nullopt};
  }
  return std::nullopt;
}

std::optional<std::size_t> simulate_run_length(Detector& detector, const ModelSpec& model,
                                               std::size_t nu, std::size_t max_n, Rng& rng) {
  detector.reset();
  for (std::size_t n = 1; n <= max_n; ++n) {
    const double theta = (nu > 0 && n >= nu) ? model.theta_post : model.theta_pre;
    if (detector.step(model.family.sample(theta, rng))) return n;
  }
  return std::nullopt;
}

std::vector<SimReport> estimate_metrics(const DetectorSpec& detector, const ModelSpec& model,
                                        const MetricsOptions& options) {
  validate(detector);
  return estimate_metrics([&detector] { return make_detector(detector); }, model, options,
                          detector.kind == DetectorKind::cusum);
}

std::vector<SimReport> estimate_metrics(const DetectorFactory& factory, const ModelSpec& model,
                                        const MetricsOptions& options, bool iid_cusum) {
  model.family.require_in_domain(model.theta_pre);
  model.family.require_in_domain(model.theta_post);
  if (options.reps < 2) throw ConfigError("reps must be at least 2");
  if (options.max_n < 1) throw ConfigError("max_n must be at least 1");
  for (std::size_t nu : options.nus) {
    if (nu < 1) throw ConfigError("change times must be at least 1");
  }
  if (!options.pfa_starts.empty() && options.pfa_window < 1) {
    throw ConfigError("pfa_window must be at least 1");
  }
  const bool esedd = iid_cusum;
  const std::size_t n_nu = options.nus.size();
  // Columns: arl, truncated flag, edd per nu, esedd (cusum only).
  const std::size_t cols = 2 + n_nu + (esedd ? 1 : 0);
  const auto start = std::chrono::steady_clock::now();
  ReplicateOptions ro{options.reps, options.seed, options.workers};
  const std::vector<double> raw =
      replicate_raw(cols, ro, [&](std::size_t rep, Rng&, std::span<double> out) {
        auto det = factory();
        Rng arl_rng(options.seed, rep, kArlStream);
        const auto t = simulate_run_length(*det, model, 0, options.max_n, arl_rng);
        out[0] = static_cast<double>(t.value_or(options.max_n));
        out[1] = t ? 0.0 : 1.0;
        for (std::size_t j = 0; j < n_nu; ++j) {
          const std::size_t nu = options.nus[j];
          Rng rng(options.seed, rep, j + 1);
          const std::size_t tn =
              simulate_run_length(*det, model, nu, options.max_n, rng).value_or(options.max_n);
          out[2 + j] = tn >= nu ? static_cast<double>(tn - nu + 1) : std::nan("");
        }
        if (esedd) {
          Rng rng(options.seed, rep, n_nu + 1);
          out[2 + n_nu] = static_cast<double>(
              simulate_run_length(*det, model, 1, options.max_n, rng).value_or(options.max_n));
        }
      });
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  auto column = [&](std::size_t k) {
    std::vector<double> v(options.reps);
    for (std::size_t r = 0; r < options.reps; ++r) v[r] = raw[r * cols + k];
    return v;
  };
  std::vector<SimReport> out;
  const std::vector<double> arl = column(0);
  out.push_back(summarize("arl2fa", arl, options.seed, elapsed));
  out.push_back(summarize("arl2fa_truncated_fraction", column(1), options.seed, elapsed));
  SimReport sedd;
  sedd.name = "sedd";
  sedd.estimate = -kInf;
  for (std::size_t j = 0; j < n_nu; ++j) {
    SimReport r = summarize("edd_nu=" + std::to_string(options.nus[j]), column(2 + j),
                            options.seed, elapsed);
    if (r.reps > 0 && r.estimate > sedd.estimate) {
      sedd = r;
      sedd.name = "sedd";
    }
    out.push_back(r);
  }
  if (n_nu > 0) out.push_back(sedd);
  if (esedd) out.push_back(summarize("esedd_iid_surrogate", column(2 + n_nu), options.seed, elapsed));
  if (!options.pfa_starts.empty()) {
    SimReport best;
    best.estimate = -1.0;
    for (std::size_t k : options.pfa_starts) {
      std::vector<double> hit(options.reps);
      for (std::size_t r = 0; r < options.reps; ++r) {
        hit[r] = (arl[r] >= static_cast<double>(k) &&
                  arl[r] < static_cast<double>(k + options.pfa_window))
                     ? 1.0
                     : 0.0;
      }
      SimReport rk = summarize("pfa_window_k=" + std::to_string(k), hit, options.seed, elapsed);
      if (rk.estimate > best.estimate) best = rk;
      out.push_back(rk);
    }
    best.name = "pfa_window_sup";
    out.push_back(best);
    SimReport per_m = best;
    per_m.name = "pfa_window_sup_per_m";
    per_m.estimate /= static_cast<double>(options.pfa_window);
    per_m.std_error /= static_cast<double>(options.pfa_window);
    out.push_back(per_m);
  }
  return out;
}

}  // namespace seqlab::cpd
