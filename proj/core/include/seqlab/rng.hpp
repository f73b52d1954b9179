#pragma once

#include <cstdint>
#include <random>

namespace seqlab {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Random source for one replication. Streams are keyed by
// (seed, replication, stream id) so results never depend on the order in
// which replications are scheduled.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed, std::uint64_t replication = 0, std::uint64_t stream = 0)
      : engine_(key(seed, replication, stream)) {}

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
  double normal() { return normal_(engine_); }
  double normal(double mean, double sd) { return mean + sd * normal_(engine_); }
  double exponential(double rate) { return std::exponential_distribution<double>(rate)(engine_); }

  static constexpr std::uint64_t key(std::uint64_t seed, std::uint64_t replication,
                                     std::uint64_t stream) {
    return splitmix64(seed ^ splitmix64(replication ^ splitmix64(stream + 0x51ed2701ULL)));
  }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace seqlab
