#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

namespace afe {

/// Seeded PRNG used for every stochastic draw (init, shuffling, dropout,
/// augmentation, synthesis). Streams derived with `fork` are independent of
/// the order in which they are consumed, which keeps parallel code
/// deterministic.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(mix(seed)), seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  /// Child stream keyed by `stream`; the parent state is not advanced.
  Rng fork(std::uint64_t stream) const { return Rng(mix(seed_ ^ mix(stream + 0x632be59bd9b4e019ULL))); }

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  double normal(double mean = 0.0, double stddev = 1.0) {
    return std::normal_distribution<double>(mean, stddev)(engine_);
  }
  bool bernoulli(double p) { return uniform() < p; }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    std::shuffle(v.begin(), v.end(), engine_);
  }

  std::mt19937_64& engine() { return engine_; }

  static std::uint64_t mix(std::uint64_t x) {
    // splitmix64 finalizer
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_;
};

}  // namespace afe
