#pragma once

#include <cstdint>
#include <random>

#include "prte/normal.hpp"

namespace prte {

// Deterministic RNG with a splittable-stream contract: derive_seed(master, k)
// yields independent, reproducible streams indexed by k (replication index),
// so parallel replications do not depend on scheduling order. Normal draws
// go through the inverse cdf to stay bit-identical across platforms
// (std::normal_distribution is implementation-defined, the mt19937_64 engine
// is not).
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(master ^ splitmix64(index + 1));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  std::uint64_t next_u64() { return engine_(); }

  // uniform on (0,1), never returning an endpoint
  double uniform01() {
    const std::uint64_t bits = engine_() >> 11;  // 53 random bits
    return (static_cast<double>(bits) + 0.5) * (1.0 / 9007199254740992.0);
  }

  double normal() { return norm_quantile(uniform01()); }

  // uniform integer in [0, m); modulo bias is ~m/2^64, irrelevant here
  std::uint64_t bounded(std::uint64_t m) { return engine_() % m; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace prte
