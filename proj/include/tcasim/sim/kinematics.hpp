#pragma once

#include <cmath>
#include <cstdint>

#include "tcasim/error.hpp"
#include "tcasim/modes/frame.hpp"
#include "tcasim/units.hpp"

namespace tcasim::sim {

/// Flat-earth position: horizontal plane in nautical miles, altitude in feet.
struct Position {
  double x_nmi = 0.0;
  double y_nmi = 0.0;
  double altitude_ft = 0.0;
  bool operator==(const Position&) const = default;
};

struct Velocity {
  double vx_kt = 0.0;
  double vy_kt = 0.0;
  double vertical_rate_fpm = 0.0;
  bool operator==(const Velocity&) const = default;
};

enum class TransponderMode { standby, ta_only, ta_ra };

/// SL1 standby, SL2 TA-only, SL3+ TA/RA.
constexpr int sensitivity_level(TransponderMode mode) {
  switch (mode) {
    case TransponderMode::standby: return 1;
    case TransponderMode::ta_only: return 2;
    case TransponderMode::ta_ra: return 3;
  }
  return 1;
}

struct AircraftState {
  modes::IcaoAddress icao;
  Position position;
  Velocity velocity;
  TransponderMode transponder_mode = TransponderMode::ta_ra;
};

/// Straight-line constant-velocity advance. Altitude stops at 0 ft.
inline AircraftState step_kinematics(const AircraftState& state, double dt_s) {
  if (!(dt_s > 0.0)) throw Error(ErrorCode::parameter, "kinematic step must be positive");
  AircraftState next = state;
  next.position.x_nmi += state.velocity.vx_kt * dt_s / 3600.0;
  next.position.y_nmi += state.velocity.vy_kt * dt_s / 3600.0;
  next.position.altitude_ft = std::max(0.0, state.position.altitude_ft + state.velocity.vertical_rate_fpm * dt_s / 60.0);
  return next;
}

inline double horizontal_distance_nmi(const Position& a, const Position& b) {
  return std::hypot(a.x_nmi - b.x_nmi, a.y_nmi - b.y_nmi);
}

inline double slant_range_m(const Position& a, const Position& b) {
  const double dx = (a.x_nmi - b.x_nmi) * units::kMetersPerNmi;
  const double dy = (a.y_nmi - b.y_nmi) * units::kMetersPerNmi;
  const double dz = (a.altitude_ft - b.altitude_ft) * units::kMetersPerFoot;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

inline double slant_range_nmi(const Position& a, const Position& b) { return slant_range_m(a, b) / units::kMetersPerNmi; }

/// Light time between two points, rounded to the nearest nanosecond.
inline TimeNs propagation_delay_ns(const Position& a, const Position& b) {
  return static_cast<TimeNs>(std::llround(slant_range_m(a, b) / units::kSpeedOfLight * 1e9));
}

}  // namespace tcasim::sim
