#pragma once

#include <cmath>
#include <cstdint>

namespace tcasim {

/// Simulation time, integer nanoseconds.
using TimeNs = std::int64_t;

namespace units {

inline constexpr double kSpeedOfLight = 299'792'458.0;  // m/s
inline constexpr double kMetersPerNmi = 1852.0;
inline constexpr double kMetersPerFoot = 0.3048;
inline constexpr double kFeetPerNmi = kMetersPerNmi / kMetersPerFoot;
inline constexpr TimeNs kNsPerSecond = 1'000'000'000;
inline constexpr TimeNs kNsPerMicrosecond = 1'000;

constexpr double seconds(TimeNs t) { return static_cast<double>(t) / 1e9; }
inline TimeNs from_seconds(double s) { return static_cast<TimeNs>(std::llround(s * 1e9)); }

/// One-way light time for a distance in nautical miles, in (fractional) ns.
constexpr double light_time_ns(double nmi) { return nmi * kMetersPerNmi / kSpeedOfLight * 1e9; }

/// Distance in nautical miles covered by light in `ns` nanoseconds.
constexpr double light_distance_nmi(double ns) { return ns * 1e-9 * kSpeedOfLight / kMetersPerNmi; }

/// Range corresponding to one nanosecond of round-trip timing (~0.15 m).
inline constexpr double kRangePerRttNs = 0.5e-9 * kSpeedOfLight / kMetersPerNmi;

}  // namespace units
}  // namespace tcasim
