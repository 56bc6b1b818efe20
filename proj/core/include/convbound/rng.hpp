#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace convbound::rng {

// splitmix64 step (Steele, Lea, Flood 2014). Used only to spread seeds, not
// as the sampling engine.
inline constexpr std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Deterministic sub-seed for a numbered stream (shard, module, retry). Two
// splitmix64 steps decorrelate adjacent (seed, stream) pairs.
inline constexpr std::uint64_t derive_seed(std::uint64_t seed,
                                           std::uint64_t stream) {
  std::uint64_t state = seed ^ (stream * 0xD1B54A32D192ED03ull);
  (void)splitmix64(state);
  return splitmix64(state);
}

// mt19937_64 with hand-rolled variate mappings. The engine's output sequence
// is fixed by the C++ standard; std::uniform_real_distribution and
// std::poisson_distribution are not, and would break byte-identical output
// across standard libraries.
class Engine {
 public:
  explicit Engine(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next() { return gen_(); }

  // Uniform on [0,1) with 53-bit resolution.
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // Uniform index in [0,n). Multiply-shift; bias is O(n / 2^64).
  std::size_t uniform_index(std::size_t n) {
    return static_cast<std::size_t>(
        (static_cast<unsigned __int128>(gen_()) * n) >> 64);
  }

  // Standard normal via Box-Muller. No spare caching: two uniforms per draw
  // keeps the consumption pattern trivially reproducible.
  double normal() {
    double u1 = uniform01();
    double u2 = uniform01();
    // u1 == 0 would take log(0); nudge to the smallest representable draw
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(6.283185307179586476925286766559 * u2);
  }

  // Poisson count via Knuth multiplication. exp(-lambda) underflows past
  // ~745, so large rates are drawn as sums of <=500 chunks.
  std::uint32_t poisson(double lambda) {
    std::uint32_t total = 0;
    while (lambda > 500.0) {
      total += poisson_small(500.0);
      lambda -= 500.0;
    }
    return total + poisson_small(lambda);
  }

 private:
  std::uint32_t poisson_small(double lambda) {
    if (lambda <= 0.0) return 0;
    const double limit = std::exp(-lambda);
    std::uint32_t k = 0;
    double product = 1.0;
    do {
      ++k;
      product *= uniform01();
    } while (product > limit);
    return k - 1;
  }

  std::mt19937_64 gen_;
};

}  // namespace convbound::rng
