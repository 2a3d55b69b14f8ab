#pragma once

#include <cstdint>
#include <random>

// Seeding and portable random draws.
//
// All stochastic components draw from std::mt19937_64, whose output sequence
// is fixed by the C++ standard. Uniform variates are built directly from the
// raw 64-bit output instead of <random> distributions, so that results do not
// depend on the standard-library implementation. Derived stream seeds are
// produced with the splitmix64 finalizer; a (grid index, replicate) pair maps
// to the same seed no matter how many other grid points exist.

namespace tddyn {

inline constexpr std::uint64_t kSeedGamma = 0x9E3779B97F4A7C15ULL;

/// splitmix64 finalizer (Steele, Lea & Flood).
inline constexpr std::uint64_t splitmix64_mix(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

/// Stream seed for grid cell `grid_index`, replicate `replicate` under `base`.
/// Depends only on the three arguments, so extending a sweep grid never
/// perturbs the randomness of existing rows.
inline constexpr std::uint64_t derive_seed(std::uint64_t base,
                                           std::uint64_t grid_index,
                                           std::uint64_t replicate = 0) {
  std::uint64_t h = splitmix64_mix(base + kSeedGamma);
  h = splitmix64_mix(h + kSeedGamma * (grid_index + 1));
  h = splitmix64_mix(h + kSeedGamma * (replicate + 1));
  return h;
}

inline std::mt19937_64 make_rng(std::uint64_t seed) {
  return std::mt19937_64{seed};
}

/// Uniform double in [0, 1), 53 random bits.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Unbiased uniform integer in [0, n), n >= 1, by rejection.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
  for (;;) {
    const std::uint64_t x = rng();
    if (x >= threshold) return x % n;
  }
}

/// Uniform integer in [lo, hi], inclusive.
inline int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return lo + static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(hi - lo) + 1));
}

inline const char* rng_algorithm_name() { return "mt19937_64+splitmix64"; }

}  // namespace tddyn
