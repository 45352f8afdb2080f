#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace cirl {

/// Engine used everywhere randomness is needed. Only the raw 64-bit output
/// is consumed, so streams are identical across standard libraries.
using Rng = std::mt19937_64;

/// Uniform double in [lo, hi) built from the top 53 bits of one draw.
inline double uniform_real(Rng& rng, double lo, double hi) {
  const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * unit;
}

/// Uniform integer in [0, n). Rejection sampling keeps it unbiased.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x = rng();
  while (x >= limit) x = rng();
  return x % n;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Child seed derived from (base seed, label, index). Adding new labels never
/// perturbs the seeds of existing ones.
inline std::uint64_t derive_seed(std::uint64_t base, std::string_view label,
                                 std::uint64_t index) {
  std::uint64_t h = splitmix64(base);
  h = splitmix64(h ^ fnv1a(label));
  return splitmix64(h ^ splitmix64(index));
}

}  // namespace cirl
