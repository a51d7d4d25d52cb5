#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace v2x {

/// Independent random streams per concern. Toggling one feature never shifts
/// the sequence another concern sees.
enum class Stream : std::uint64_t {
  kDrop = 1,
  kShadowing = 2,
  kFading = 3,
  kCueTraffic = 4,
  kBueFading = 5,
};

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline constexpr std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v) {
  return splitmix64(h ^ splitmix64(v));
}

inline std::mt19937_64 make_stream(std::uint64_t seed, Stream s) {
  return std::mt19937_64(hash_combine(splitmix64(seed), static_cast<std::uint64_t>(s)));
}

/// Uniform on (0, 1], never zero so log() is safe.
inline double unit_from_bits(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

/// Counter-based CN(0,1) sample: a pure function of its key. Used for the
/// per-(link, RB, TTI) fading draws so lazy evaluation stays reproducible
/// regardless of the order the scheduler touches links in.
std::complex<double> keyed_complex_normal(std::uint64_t key);

/// Sequential CN(0,1) sample from a stateful engine.
std::complex<double> complex_normal(std::mt19937_64& rng);

}  // namespace v2x
