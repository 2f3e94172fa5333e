#pragma once

#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>

namespace fanlab {

// SplitMix64 finaliser (Steele, Lea & Flood). Used both as a hash for
// counter-based subkeys and as the step function of CounterStream.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Derive an independent key from a parent key and a counter. Chaining calls
// gives keys for tuples, e.g. subkey(subkey(seed, site), block).
// Signed counters are reinterpreted as two's complement.
template <std::integral I>
constexpr std::uint64_t subkey(std::uint64_t key, I counter) noexcept {
  return mix64(key ^ mix64(static_cast<std::uint64_t>(counter) ^ 0xD1B54A32D192ED03ULL));
}

// Short-lived stream of 64-bit words rooted at a subkey. Satisfies
// UniformRandomBitGenerator so it can drive <random> if needed, but the
// helpers below are used everywhere so results do not depend on the
// standard library's distribution implementations.
class CounterStream {
 public:
  using result_type = std::uint64_t;

  explicit constexpr CounterStream(std::uint64_t key) noexcept : state_(key) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() noexcept {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform() noexcept {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Unit-mean exponential; strictly positive and finite.
  double exponential() noexcept { return -std::log(uniform()); }

  bool bernoulli(double p) noexcept { return uniform() < p; }

 private:
  std::uint64_t state_;
};

}  // namespace fanlab
