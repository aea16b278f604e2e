#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace freqaug {

namespace detail {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

// SplitMix64 finalizer; a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace detail

/// Deterministic per-item seed, e.g. for the i-th image of a batch.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return detail::mix64(detail::mix64(seed + detail::kGolden) ^ (index * 0xD1B54A32D192ED03ULL));
}

/// Counter-based generator: output n is mix(key + n * golden). Streams are
/// split by hashing (key, index) into a fresh key, so draws for image i never
/// depend on how many draws other images made.
///
/// Distribution sampling is done here rather than through <random>
/// distributions, whose algorithms differ between standard libraries.
class SeedStream {
 public:
  using result_type = std::uint64_t;

  explicit SeedStream(std::uint64_t seed) : key_(detail::mix64(seed ^ 0x5851F42D4C957F2DULL)) {}

  /// Independent child stream for `index` (image position, batch number...).
  SeedStream split(std::uint64_t index) const {
    SeedStream child(0);
    child.key_ = detail::mix64(key_ ^ detail::mix64(index + detail::kGolden));
    return child;
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    return detail::mix64(key_ + (counter_++) * detail::kGolden);
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return p >= 1.0 || (p > 0.0 && uniform() < p); }

  /// Uniform integer in [0, n) by rejection; n must be > 0.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = max() - max() % n;
    std::uint64_t v;
    do {
      v = (*this)();
    } while (v >= limit);
    return v % n;
  }

  /// Standard normal via Box-Muller (one value per call).
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace freqaug
