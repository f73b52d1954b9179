#include "seqlab/sim.hpp"

#include <chrono>

#include "seqlab/errors.hpp"

namespace seqlab {

std::size_t default_workers() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

SimReport summarize(std::string name, std::span<const double> values, std::uint64_t seed,
                    double wall_time) {
  Welford acc;
  for (double v : values) {
    if (!std::isnan(v)) acc.add(v);
  }
  SimReport r;
  r.name = std::move(name);
  r.estimate = acc.mean();
  r.std_error = acc.std_error();
  r.reps = acc.count();
  r.seed = seed;
  r.wall_time = wall_time;
  return r;
}

std::vector<double> replicate_raw(std::size_t metrics, const ReplicateOptions& options,
                                  const ReplicationFn& fn) {
  if (options.reps < 2) throw ConfigError("reps must be at least 2");
  std::vector<double> values(options.reps * metrics, std::nan(""));
  parallel_for(options.reps, options.workers, [&](std::size_t rep) {
    Rng rng(options.seed, rep);
    fn(rep, rng, std::span<double>(values.data() + rep * metrics, metrics));
  });
  return values;
}

std::vector<SimReport> replicate(const std::vector<std::string>& metrics,
                                 const ReplicateOptions& options, const ReplicationFn& fn) {
  const auto start = std::chrono::steady_clock::now();
  const std::vector<double> values = replicate_raw(metrics.size(), options, fn);
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::vector<SimReport> out;
  std::vector<double> column(options.reps);
  for (std::size_t k = 0; k < metrics.size(); ++k) {
    for (std::size_t r = 0; r < options.reps; ++r) column[r] = values[r * metrics.size() + k];
    out.push_back(summarize(metrics[k], column, options.seed, elapsed));
  }
  return out;
}

}  // namespace seqlab
