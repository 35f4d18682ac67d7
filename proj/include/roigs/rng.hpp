#pragma once

#include <cstdint>
#include <string_view>

namespace roigs {

/// SplitMix64 generator (Steele/Lea/Flood constants). Fixtures depend on the
/// exact output sequence, so the algorithm is pinned here instead of using
/// std::mt19937 or the platform distributions.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform double in [lo, hi).
  double next_in(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

  /// Uniform integer in [0, n) via 128-bit multiply-shift (n > 0).
  std::uint64_t next_below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next()) * n) >> 64);
  }

 private:
  std::uint64_t state_;
};

/// FNV-1a hash of a stream tag, used to derive independent substreams from
/// one user seed. Identical (seed, tag) pairs always yield identical streams.
inline std::uint64_t stream_seed(std::uint64_t seed, std::string_view tag) {
  std::uint64_t h = 14695981039346656037ULL;
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  // Mix the user seed through one SplitMix64 step so seed 0 is usable.
  SplitMix64 mix(h ^ (seed + 0x9E3779B97F4A7C15ULL));
  return mix.next();
}

inline SplitMix64 stream_rng(std::uint64_t seed, std::string_view tag) {
  return SplitMix64(stream_seed(seed, tag));
}

}  // namespace roigs
