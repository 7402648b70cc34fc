#pragma once

#include <cstdint>
#include <random>

namespace wvar {

using Rng = std::mt19937_64;

// splitmix64 finalizer; used to derive independent per-task seeds.
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t subseed(std::uint64_t seed, std::uint64_t stream) {
  return mix_seed(seed ^ mix_seed(stream + 1));
}

inline double uniform01(Rng& rng) {
  // 53 random mantissa bits; independent of the standard library's
  // distribution implementation so streams are portable.
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

inline double standard_normal(Rng& rng) {
  // Box-Muller with the same portability motivation as uniform01.
  double u1 = uniform01(rng);
  while (u1 <= 0.0) u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

}  // namespace wvar
