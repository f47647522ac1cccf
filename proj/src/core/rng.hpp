#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace svy {

// SplitMix64 finalizer; used for seeding and for deriving substream keys.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// xoshiro256++ (Blackman & Vigna). Satisfies UniformRandomBitGenerator so it
/// can drive the <random> distributions. Substreams are obtained by hashing a
/// tuple of counters into a fresh seed (see `Rng::substream`).
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) noexcept;

  // Independent stream keyed on (seed, k0, k1, ...). Pure function of its
  // arguments, so replicate i of a cell can be regenerated in isolation.
  static Rng substream(std::uint64_t seed,
                       std::initializer_list<std::uint64_t> keys) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept;

  // Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

  // Uniform integer on [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound) noexcept;

 private:
  std::uint64_t s_[4];
};

}  // namespace svy
