#include "v2x/rng.hpp"

#include <cmath>

#include "v2x/units.hpp"

namespace v2x {

namespace {

// |z|^2 = -ln(u1) is Exp(1) and the phase is uniform, which gives CN(0,1).
std::complex<double> polar_normal(double u1, double u2) {
  const double r = std::sqrt(-std::log(u1));
  const double theta = 2.0 * kPi * u2;
  return {r * std::cos(theta), r * std::sin(theta)};
}

}  // namespace

std::complex<double> keyed_complex_normal(std::uint64_t key) {
  const std::uint64_t a = splitmix64(key);
  const std::uint64_t b = splitmix64(a ^ 0x5851f42d4c957f2dULL);
  return polar_normal(unit_from_bits(a), unit_from_bits(b));
}

std::complex<double> complex_normal(std::mt19937_64& rng) {
  const double u1 = unit_from_bits(rng());
  const double u2 = unit_from_bits(rng());
  return polar_normal(u1, u2);
}

}  // namespace v2x
