#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace v2x {

inline constexpr double kSpeedOfLight = 3.0e8;  // m/s
inline constexpr double kPi = 3.14159265358979323846;

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }
inline double dbm_to_mw(double dbm) { return db_to_linear(dbm); }

// Simulation time is counted in numerology-3 TTIs (0.125 ms). BWP-2 runs on
// numerology 0, so one of its slots spans kTicksPerMs ticks.
using Tick = std::int64_t;
inline constexpr Tick kTicksPerMs = 8;
inline constexpr double kMsPerTick = 1.0 / static_cast<double>(kTicksPerMs);

inline double ticks_to_ms(Tick t) { return static_cast<double>(t) * kMsPerTick; }

inline Tick ms_to_ticks(double ms) {
  return static_cast<Tick>(std::llround(ms * static_cast<double>(kTicksPerMs)));
}

/// Raised for invalid user-supplied configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace v2x
