#pragma once

#include <cstdint>

namespace permutex {

  // SplitMix64 finaliser. Every pseudo-random choice in the library is a
  // function of this mixer so generated cases are identical on every
  // platform and standard library.
  constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
  }

  class SplitMix {
   public:
    explicit constexpr SplitMix(std::uint64_t seed) noexcept : _state(seed) {}

    // Stream for case `index` of a sweep seeded with `seed`.
    static constexpr SplitMix for_case(std::uint64_t seed,
                                       std::uint64_t index) noexcept {
      return SplitMix(mix64(seed) ^ mix64(index ^ 0xD1B54A32D192ED03ULL));
    }

    constexpr std::uint64_t next() noexcept {
      _state += 0x9E3779B97F4A7C15ULL;
      std::uint64_t z = _state;
      z               = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
      z               = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
      return z ^ (z >> 31);
    }

    // Uniform in [0, bound). Rejection sampling keeps it unbiased.
    constexpr std::uint64_t below(std::uint64_t bound) noexcept {
      if (bound <= 1) {
        return 0;
      }
      std::uint64_t const limit = -bound % bound;
      for (;;) {
        std::uint64_t r = next();
        if (r >= limit) {
          return r % bound;
        }
      }
    }

   private:
    std::uint64_t _state;
  };

}  // namespace permutex
