#pragma once

// Monte Carlo replication engine. Replication r always draws from
// Rng(seed, r), and results are aggregated in replication order, so reports
// do not depend on the number of workers.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "seqlab/rng.hpp"

namespace seqlab {

struct SimReport {
  std::string name;
  double estimate = 0.0;
  double std_error = 0.0;
  std::size_t reps = 0;
  std::uint64_t seed = 0;
  double wall_time = 0.0;
};

class Welford {
 public:
  void add(double x) {
    ++n_;
    const double d = x - mean_;
    mean_ += d / static_cast<double>(n_);
    m2_ += d * (x - mean_);
  }
  std::size_t count() const { return n_; }
  double mean() const { return n_ > 0 ? mean_ : std::nan(""); }
  double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : std::nan(""); }
  double std_error() const {
    return n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : std::nan("");
  }

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

// Runs f(i) for i in [0, n) on up to `workers` threads. The first exception
// thrown by any call is rethrown after all threads finish.
template <class F>
void parallel_for(std::size_t n, std::size_t workers, F&& f) {
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto body = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        f(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(n);
      }
    }
  };
  std::vector<std::thread> pool;
  const std::size_t k = std::min(workers, n);
  pool.reserve(k);
  for (std::size_t w = 0; w < k; ++w) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

struct ReplicateOptions {
  std::size_t reps = 1000;
  std::uint64_t seed = 1;
  std::size_t workers = 1;
};

// One replication writes one value per metric into `out`; NaN marks a value
// that does not apply to this replication and is left out of that mean.
using ReplicationFn = std::function<void(std::size_t rep, Rng& rng, std::span<double> out)>;

std::vector<SimReport> replicate(const std::vector<std::string>& metrics,
                                 const ReplicateOptions& options, const ReplicationFn& fn);

// Same as replicate() but also returns the raw per-replication matrix
// (row-major, reps x metrics).
std::vector<double> replicate_raw(std::size_t metrics, const ReplicateOptions& options,
                                  const ReplicationFn& fn);

SimReport summarize(std::string name, std::span<const double> values, std::uint64_t seed,
                    double wall_time = 0.0);

std::size_t default_workers();

}  // namespace seqlab
