#pragma once

#include <cstdint>

namespace naesat {

// SplitMix64 (Steele, Lea, Flood 2014). Output i of the stream with seed s is
// mix(s + (i+1)*0x9E3779B97F4A7C15), so every draw is a pure function of
// (seed, counter) and can be reproduced in any language.
inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t next() {
    ++counter_;
    return splitmix64_mix(seed_ + counter_ * kGolden);
  }

  // Uniform on [0, n) by rejection from the top of the 64-bit range.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x = next();
    while (x >= limit) x = next();
    return x % n;
  }

  // Uniform on [0,1) from the top 53 bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  int bit() { return static_cast<int>(next() >> 63); }

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

// Seed of the independent stream for trial `index` under `master`.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64_mix(splitmix64_mix(master) ^ (index * kGolden + 0xD1B54A32D192ED03ULL));
}

}  // namespace naesat
