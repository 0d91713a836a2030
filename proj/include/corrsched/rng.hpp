#pragma once

#include <cstddef>
#include <cstdint>

namespace corrsched {

// SplitMix64 finalizer. Used for seeding and for deriving stream keys.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// xoshiro256** (Blackman & Vigna). Portable: the output sequence depends only
// on the seed, never on the platform or standard library.
//
// Streams: Rng::stream(seed, k) keys the generator with
// mix64(seed) ^ mix64(k ^ kStreamSalt) and expands that key into the four
// state words with SplitMix64. Simulation round k always uses stream k, so
// results do not depend on how rounds are distributed across threads.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) { reseed(seed); }

  static Rng stream(std::uint64_t seed, std::uint64_t index) {
    return Rng(mix64(seed) ^ mix64(index ^ kStreamSalt));
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n), n >= 1. Rejection sampling, no modulo bias.
  std::size_t below(std::size_t n) {
    const std::uint64_t bound = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = max() - max() % bound;
    std::uint64_t x = (*this)();
    while (x >= limit) x = (*this)();
    return static_cast<std::size_t>(x % bound);
  }

 private:
  static constexpr std::uint64_t kStreamSalt = 0xD1B54A32D192ED03ULL;

  static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  void reseed(std::uint64_t seed) {
    std::uint64_t z = seed;
    for (auto& word : s_) {
      word = mix64(z);
      z += 0x9E3779B97F4A7C15ULL;
    }
  }

  std::uint64_t s_[4]{};
};

// Independent seed for a named sub-task, e.g. derive_seed(seed, trial, 1).
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
  return mix64(mix64(seed ^ 0x5851F42D4C957F2DULL) + mix64(a) * 31 + mix64(b ^ 0x14057B7EF767814FULL));
}

}  // namespace corrsched
