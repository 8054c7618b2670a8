#ifndef QUADGEN_RANDOM_HPP
#define QUADGEN_RANDOM_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace quadgen {

/// Seeded generator with fully specified output sequences (std distribution
/// objects are implementation-defined, which would break bit-identical
/// reproducibility of rules across platforms).
class RandomStream {
public:
  explicit RandomStream(std::uint64_t seed) : rng_(seed) {}

  std::uint64_t raw() { return rng_(); }

  /// Uniform on [0,1) with 53 random bits.
  double uniform01() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  /// Standard normal via Box-Muller.
  double normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    double u1 = uniform01(), u2 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    double r = std::sqrt(-2.0 * std::log(u1));
    cached_ = r * std::sin(6.283185307179586476925286766559 * u2);
    have_cached_ = true;
    return r * std::cos(6.283185307179586476925286766559 * u2);
  }

  /// Integer in [0, bound); modulo bias is irrelevant for our bounds.
  std::uint64_t integer(std::uint64_t bound) { return rng_() % bound; }

  /// Independent child stream (for per-repetition seeding).
  RandomStream spawn() { return RandomStream(rng_() ^ 0x9e3779b97f4a7c15ull); }

private:
  std::mt19937_64 rng_;
  bool have_cached_ = false;
  double cached_ = 0.0;
};

}  // namespace quadgen

#endif
