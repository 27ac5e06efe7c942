#ifndef PENSIM_RNG_HPP
#define PENSIM_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <string>

namespace pensim {

// Algorithm identifier recorded in manifests and checkpoints. Streams are
// mt19937_64 seeded through splitmix64; all variate transforms below are
// fixed in this header, so a (seed, draw order) pair pins every result.
inline constexpr const char* kRngAlgorithm = "mt19937_64/splitmix64-derive/v1";

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Deterministic sub-stream derivation: replicate r of seed s always gets the
// same stream, independent of how many other streams were split off.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t s = seed ^ (0xA0761D6478BD642FULL + stream * 0xE7037ED1A0B428DBULL);
  return splitmix64(s);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static Rng split(std::uint64_t seed, std::uint64_t stream) {
    return Rng(derive_seed(seed, stream));
  }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform01() { return (next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + uniform01() * (hi - lo); }

  // Unbiased integer in [0, n) by rejection.
  std::uint64_t uniform_int(std::uint64_t n) {
    if (n == 0) return 0;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do {
      v = next_u64();
    } while (v >= limit);
    return v % n;
  }

  bool bernoulli(double p) { return uniform01() < p; }

  // Box-Muller; consumes exactly two uniforms per call (no caching, so
  // replaying a recorded stream stays aligned).
  double gaussian(double mean = 0.0, double stddev = 1.0) {
    double u1 = uniform01();
    double u2 = uniform01();
    if (u1 < 1e-300) u1 = 1e-300;
    const double r = std::sqrt(-2.0 * std::log(u1));
    return mean + stddev * r * std::cos(6.283185307179586476925286766559 * u2);
  }

  // Rejection sampling: values beyond `bound` standard deviations are
  // discarded and re-drawn, never clipped.
  double truncated_gaussian(double stddev, double bound = 2.0) {
    double v;
    do {
      v = gaussian(0.0, stddev);
    } while (std::fabs(v) > bound * stddev);
    return v;
  }

  // Knuth's product method; adequate for the small fertility rates used here.
  int poisson(double lambda) {
    if (lambda <= 0.0) return 0;
    const double threshold = std::exp(-lambda);
    int k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= uniform01();
    } while (p > threshold);
    return k - 1;
  }

  // Unbiased integerization of a fractional count.
  std::int64_t stochastic_round(double value) {
    const double f = std::floor(value);
    const std::int64_t base = static_cast<std::int64_t>(f);
    return bernoulli(value - f) ? base + 1 : base;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace pensim

#endif  // PENSIM_RNG_HPP
