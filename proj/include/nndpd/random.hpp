#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace nndpd {

/// SplitMix64 finalizer. Used to derive independent child seeds from a
/// master seed so every consumer gets its own stream.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Stream identifiers for mix_seed. Fixed so output is stable across releases.
namespace streams {
inline constexpr std::uint64_t kDatasetBits = 1;
inline constexpr std::uint64_t kInitParams = 2;
inline constexpr std::uint64_t kShuffleAmAm = 3;
inline constexpr std::uint64_t kShuffleAmPm = 4;
inline constexpr std::uint64_t kSweepPoint = 5;
}  // namespace streams

/// Portable random source. The std distributions are implementation-defined,
/// so everything here is derived from raw mt19937_64 output.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Unbiased integer in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t r;
    do {
      r = engine_();
    } while (r >= limit);
    return r % bound;
  }

  void fill_bits(std::span<std::uint8_t> bits) {
    std::uint64_t word = 0;
    int left = 0;
    for (auto& b : bits) {
      if (left == 0) {
        word = engine_();
        left = 64;
      }
      b = static_cast<std::uint8_t>(word & 1U);
      word >>= 1;
      --left;
    }
  }

  /// Fisher-Yates.
  template <class T>
  void shuffle(std::span<T> values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(values[i - 1], values[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace nndpd
