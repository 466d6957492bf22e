#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace scenario {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Independent per-task seed: mix64(master ^ mix64(index)). Tasks seeded this
/// way can run in any order or concurrently and still merge deterministically.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) { return mix64(master ^ mix64(index)); }

/// Deterministic generator. mt19937_64's output sequence is fixed by the
/// standard; the real-valued transforms below are ours, so results do not
/// depend on the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1) with 53 random bits.
  double canonical() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform in [lo, hi]; returns lo for point ranges.
  double uniform(double lo, double hi) {
    if (!(lo < hi)) return lo;
    const double u = canonical();
    double x = lo + u * (hi - lo);
    if (!std::isfinite(x)) x = lo * (1.0 - u) + hi * u;
    return x < lo ? lo : (x > hi ? hi : x);
  }

  /// Standard normal via Box-Muller (one value per call).
  double normal() {
    const double u1 = 1.0 - canonical();  // (0, 1]
    const double u2 = canonical();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  /// Normal(mean, stddev) restricted to [lo, hi] by rejection. Wide ranges use
  /// a normal proposal; narrow ones a uniform proposal accepted with the
  /// density ratio, so neither path degenerates. `mean` must lie in [lo, hi].
  double truncated_normal(double mean, double stddev, double lo, double hi) {
    if (!(lo < hi)) return lo;
    if (hi - lo > stddev) {
      while (true) {
        const double x = mean + stddev * normal();
        if (x >= lo && x <= hi) return x;
      }
    }
    while (true) {
      const double x = uniform(lo, hi);
      const double z = (x - mean) / stddev;
      if (canonical() < std::exp(-0.5 * z * z)) return x;
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace scenario
