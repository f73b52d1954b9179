#pragma once

// Single-changepoint detectors driven by log-likelihood-ratio increments:
// CUSUM, Shiryaev-Roberts / Shiryaev, window-limited CUSUM, window-limited
// mixture CUSUM, and the windowed detection-isolation rule.

#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "seqlab/expfam.hpp"
#include "seqlab/sim.hpp"

namespace seqlab::cpd {

struct CusumState {
  double w = 0.0;
  std::size_t n = 0;
};

// W_n = max(W_{n-1} + z, 0).
CusumState cusum_update(CusumState state, double z);
// a = log gamma, gamma >= 1.
double cusum_threshold(double gamma);

struct SrState {
  double r = 0.0;
  std::size_t n = 0;
  // p = 0 is the Shiryaev-Roberts statistic, p in (0, 1) Shiryaev's R_{n,p}.
  double p = 0.0;
};

// r <- (1 + r) e^z / (1 - p).
SrState sr_update(SrState state, double z);

// log(2m / alpha).
double wl_threshold(double alpha, std::size_t m);
// ceil(slack |log alpha| / info).
std::size_t window_size(double alpha, double info, double slack = 1.5);
// log(2N / alpha).
double isolation_threshold(std::size_t hypotheses, double alpha);

struct Alarm {
  std::size_t time = 0;
  double statistic = 0.0;
  // 1-based hypothesis index for detection-isolation alarms.
  std::optional<std::size_t> isolated;
};

// Windowed maximum of suffix sums over candidates nu in [max(1, n - m), n].
// Each candidate keeps its own running sum, so with m >= n the statistic is
// bitwise equal to the unlimited max form.
class WindowCusum {
 public:
  explicit WindowCusum(std::size_t m);

  void reset();
  void push(double z);
  std::size_t window() const { return m_; }
  std::size_t n() const { return n_; }
  // Alarms are allowed once n >= m.
  bool ready() const { return n_ >= m_; }
  double statistic() const;

 private:
  std::size_t m_;
  std::size_t n_ = 0;
  std::deque<double> acc_;
};

// Windowed mixture CUSUM over a discrete prior on the post-change parameter.
// push() takes one LLR increment per atom.
class WindowMixture {
 public:
  WindowMixture(std::size_t m, std::span<const double> weights);

  void reset();
  void push(std::span<const double> z);
  std::size_t atoms() const { return log_w_.size(); }
  std::size_t n() const { return n_; }
  bool ready() const { return n_ >= m_; }
  double statistic() const;

 private:
  std::size_t m_;
  std::size_t n_ = 0;
  std::vector<double> log_w_;
  std::deque<std::vector<double>> acc_;
};

// Windowed detection-isolation among N post-change hypotheses. push() takes
// the increments of lambda(i, 0) for i = 1..N.
class DetectIsolate {
 public:
  DetectIsolate(std::size_t hypotheses, std::size_t m);

  void reset();
  void push(std::span<const double> z);
  std::size_t n() const { return n_; }
  // max over i of M_i - max(0, max_{l != i} M_l).
  double statistic() const;
  // argmax_i M_i, smallest index on ties, 1-based.
  std::size_t decision() const;
  // Windowed maxima M_i.
  const std::vector<double>& maxima() const { return maxima_; }

 private:
  std::size_t hyp_;
  std::size_t m_;
  std::size_t n_ = 0;
  std::deque<std::vector<double>> acc_;
  std::vector<double> maxima_;
};

std::optional<Alarm> run_detect_isolate(std::size_t hypotheses, std::size_t m, double a,
                                        std::span<const std::vector<double>> increments);

enum class DetectorKind { cusum, sr, shiryaev, wl_cusum, wl_mix };

DetectorKind detector_kind_from_name(const std::string& name);

struct DetectorSpec {
  DetectorKind kind = DetectorKind::cusum;
  expfam::Family family = expfam::Family::gaussian();
  double theta0 = 0.0;  // pre-change parameter
  double theta1 = 1.0;  // post-change parameter (ignored by wl_mix)
  double threshold = 5.0;
  double p = 0.0;       // shiryaev
  double r0 = 0.0;      // head start for sr / shiryaev
  std::size_t m = 0;    // window for wl_cusum / wl_mix
  std::vector<double> grid;     // wl_mix atoms
  std::vector<double> weights;  // wl_mix prior weights (sum to 1)
};

void validate(const DetectorSpec& spec);

// A detector consuming raw observations.
class Detector {
 public:
  virtual ~Detector() = default;
  virtual void reset() = 0;
  // Returns true when the detector alarms at this observation.
  virtual bool step(double x) = 0;
  virtual double statistic() const = 0;
};

std::unique_ptr<Detector> make_detector(const DetectorSpec& spec);

// Runs a detector over a recorded sequence; first alarm or nothing.
std::optional<Alarm> first_alarm(Detector& detector, std::span<const double> xs);

struct ModelSpec {
  expfam::Family family = expfam::Family::gaussian();
  double theta_pre = 0.0;
  double theta_post = 1.0;
};

struct MetricsOptions {
  std::size_t reps = 1000;
  std::uint64_t seed = 1;
  std::size_t workers = 1;
  std::vector<std::size_t> nus{1};
  std::vector<std::size_t> pfa_starts;
  std::size_t pfa_window = 0;
  std::size_t max_n = 10000000;
};

// Stream ids used for the per-replication random sources: the in-control run
// uses stream 0 and the run with change at nus[j] uses stream j + 1.
inline constexpr std::uint64_t kArlStream = 0;

// Monte Carlo ARL2FA, EDD at each nu (conditional on T >= nu), SEDD over the
// nu list, the i.i.d. CUSUM ESEDD surrogate and windowed false-alarm
// probabilities.
std::vector<SimReport> estimate_metrics(const DetectorSpec& detector, const ModelSpec& model,
                                        const MetricsOptions& options);

using DetectorFactory = std::function<std::unique_ptr<Detector>()>;

// Same, for an arbitrary detector. The ESEDD surrogate is reported only when
// iid_cusum is set.
std::vector<SimReport> estimate_metrics(const DetectorFactory& factory, const ModelSpec& model,
                                        const MetricsOptions& options, bool iid_cusum);

// Alarm time of one run with change at nu (nu = 0 means no change); nothing
// if the detector has not alarmed by max_n.
std::optional<std::size_t> simulate_run_length(Detector& detector, const ModelSpec& model,
                                               std::size_t nu, std::size_t max_n, Rng& rng);

}  // namespace seqlab::cpd
