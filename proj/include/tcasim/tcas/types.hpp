#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "tcasim/modes/codec.hpp"
#include "tcasim/sim/kinematics.hpp"
#include "tcasim/units.hpp"

namespace tcasim::tcas {

enum class TrackStatus { acquiring, tracked, ta, ra, dropped };

constexpr const char* to_string(TrackStatus s) {
  switch (s) {
    case TrackStatus::acquiring: return "acquiring";
    case TrackStatus::tracked: return "tracked";
    case TrackStatus::ta: return "ta";
    case TrackStatus::ra: return "ra";
    case TrackStatus::dropped: return "dropped";
  }
  return "?";
}

struct Track {
  modes::IcaoAddress icao;
  bool has_range = false;
  double range_nmi = 0.0;
  std::optional<double> range_rate_kt;  // negative = closing
  double altitude_ft = 0.0;
  double relative_altitude_ft = 0.0;  // intruder minus own
  std::optional<double> altitude_rate_fpm;
  TimeNs last_update_ns = 0;
  TimeNs last_tx_ns = 0;
  int consecutive_misses = 0;
  TrackStatus status = TrackStatus::acquiring;

  // surveillance bookkeeping
  std::uint32_t generation = 0;
  std::optional<TimeNs> pending_tx_ns;
  TimeNs created_ns = 0;
};

enum class AdvisoryKind { ta, ra };
enum class Sense { none, climb, descend, maintain };

constexpr const char* to_string(Sense s) {
  switch (s) {
    case Sense::none: return "none";
    case Sense::climb: return "climb";
    case Sense::descend: return "descend";
    case Sense::maintain: return "maintain";
  }
  return "?";
}

struct Advisory {
  AdvisoryKind kind = AdvisoryKind::ta;
  Sense sense = Sense::none;
  double strength_fpm = 0.0;  // signed vertical rate
  /// RAC bits this unit sends to the intruder.
  std::uint8_t complement = 0;
  std::optional<double> altitude_limit_ft;
  TimeNs issued_at_ns = 0;
  modes::IcaoAddress initiator;
  modes::IcaoAddress intruder;
  /// True when the sense was imposed by a received complement.
  bool coordinated = false;
};

struct SensitivityLevel {
  int level = 3;

  static SensitivityLevel from(sim::TransponderMode mode) { return {sim::sensitivity_level(mode)}; }
  bool tracking() const { return level >= 2; }
  bool ta_enabled() const { return level >= 2; }
  bool ra_enabled() const { return level >= 3; }
};

struct TcasConfig {
  double ta_tau_s = 48.0;
  double ra_tau_s = 35.0;
  double ta_altitude_gate_ft = 1200.0;
  double alim_ft = 600.0;
  TimeNs turnaround_ns = 128 * units::kNsPerMicrosecond;
  int miss_limit = 6;
  std::size_t capacity = 30;
  TimeNs surveillance_period_ns = units::kNsPerSecond;
  TimeNs pilot_delay_ns = 5 * units::kNsPerSecond;
  /// Replies later than this after an interrogation are not matched to it.
  TimeNs listen_window_ns = 2 * units::kNsPerSecond / 1000;
  double ra_weak_fpm = 1500.0;
  double ra_strong_fpm = 2500.0;
};

/// Received resolution advisory complement.
struct ReceivedRac {
  std::uint8_t rac = 0;
  modes::IcaoAddress from;
  TimeNs received_ns = 0;
};

/// Vertical situation used to pick an RA.
struct RaGeometry {
  double own_altitude_ft = 0.0;
  double own_vertical_rate_fpm = 0.0;
  double intruder_altitude_ft = 0.0;
  double intruder_vertical_rate_fpm = 0.0;
  double tau_s = 0.0;
};

}  // namespace tcasim::tcas
