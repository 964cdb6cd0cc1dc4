#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "tcasim/error.hpp"
#include "tcasim/tcas/types.hpp"

namespace tcasim::tcas {

inline constexpr double kNoThreat = std::numeric_limits<double>::infinity();

/// Time to closest approach; kNoThreat unless closing.
inline double compute_tau(double range_nmi, double range_rate_kt) {
  if (!(range_rate_kt < 0.0)) return kNoThreat;
  return range_nmi / -range_rate_kt * 3600.0;
}

/// Range implied by a round trip, after removing the transponder turnaround.
inline double range_from_rtt(TimeNs rtt_ns, TimeNs turnaround_ns) {
  const double one_way_ns = static_cast<double>(rtt_ns - turnaround_ns) / 2.0;
  return std::max(0.0, units::light_distance_nmi(one_way_ns));
}

/// Two-point finite difference in knots.
inline double range_rate_kt(double r_prev_nmi, TimeNs t_prev_ns, double r_nmi, TimeNs t_ns) {
  if (t_ns <= t_prev_ns) throw Error(ErrorCode::parameter, "range samples must be increasing in time");
  return (r_nmi - r_prev_nmi) / units::seconds(t_ns - t_prev_ns) * 3600.0;
}

/// Folds a surveillance reply into a track: range from the round trip,
/// rates from the previous sample.
inline void apply_reply(Track& track, TimeNs tx_ns, TimeNs rx_ns, double altitude_ft, double own_altitude_ft,
                        const TcasConfig& cfg) {
  const double range = range_from_rtt(rx_ns - tx_ns, cfg.turnaround_ns);
  if (track.has_range && tx_ns > track.last_tx_ns) {
    track.range_rate_kt = range_rate_kt(track.range_nmi, track.last_tx_ns, range, tx_ns);
    track.altitude_rate_fpm = (altitude_ft - track.altitude_ft) / units::seconds(tx_ns - track.last_tx_ns) * 60.0;
  }
  track.has_range = true;
  track.range_nmi = range;
  track.altitude_ft = altitude_ft;
  track.relative_altitude_ft = altitude_ft - own_altitude_ft;
  track.last_tx_ns = tx_ns;
  track.last_update_ns = rx_ns;
  track.consecutive_misses = 0;
  track.pending_tx_ns.reset();
  if (track.status == TrackStatus::acquiring) track.status = TrackStatus::tracked;
}

enum class ThreatLevel { none, ta, ra };

/// Tau and altitude gates, then sensitivity-level gating.
inline ThreatLevel threat_detect(const Track& track, SensitivityLevel sl, const TcasConfig& cfg) {
  if (!sl.ta_enabled() || !track.has_range || !track.range_rate_kt) return ThreatLevel::none;
  const double tau = compute_tau(track.range_nmi, *track.range_rate_kt);
  const double dz = std::abs(track.relative_altitude_ft);
  if (sl.ra_enabled() && tau <= cfg.ra_tau_s && dz <= cfg.alim_ft) return ThreatLevel::ra;
  if (tau <= cfg.ta_tau_s && dz <= cfg.ta_altitude_gate_ft) return ThreatLevel::ta;
  return ThreatLevel::none;
}

/// RAC sent to the intruder for a given own sense.
constexpr std::uint8_t complement_for(Sense sense) {
  return sense == Sense::climb ? modes::rac::kDoNotPassAbove : modes::rac::kDoNotPassBelow;
}

/// Builds the RA for a chosen sense: limit at intruder altitude +/- ALIM,
/// weakest rate reaching it before CPA, maintain if already clear.
inline Advisory ra_for_sense(Sense sense, const RaGeometry& g, const TcasConfig& cfg) {
  if (sense != Sense::climb && sense != Sense::descend) throw Error(ErrorCode::parameter, "RA sense must be climb or descend");
  Advisory a;
  a.kind = AdvisoryKind::ra;
  a.complement = complement_for(sense);
  const bool up = sense == Sense::climb;
  const double limit = up ? g.intruder_altitude_ft + cfg.alim_ft : g.intruder_altitude_ft - cfg.alim_ft;
  a.altitude_limit_ft = limit;
  const double gap = up ? limit - g.own_altitude_ft : g.own_altitude_ft - limit;
  if (gap <= 0.0) {
    a.sense = Sense::maintain;
    a.strength_fpm = 0.0;
    return a;
  }
  a.sense = sense;
  const double window_min = (g.tau_s - units::seconds(cfg.pilot_delay_ns)) / 60.0;
  const double needed = window_min > 0.0 ? gap / window_min : kNoThreat;
  const double rate = needed <= cfg.ra_weak_fpm ? cfg.ra_weak_fpm : cfg.ra_strong_fpm;
  a.strength_fpm = up ? rate : -rate;
  return a;
}

/// Sense with the larger predicted vertical separation at CPA; ties go to
/// climb for the higher (or co-altitude) aircraft.
inline Sense best_sense(const RaGeometry& g, const TcasConfig& cfg) {
  const double delay_s = units::seconds(cfg.pilot_delay_ns);
  const double coast_min = std::min(g.tau_s, delay_s) / 60.0;
  const double manoeuvre_min = std::max(0.0, g.tau_s - delay_s) / 60.0;
  const double intruder_cpa = g.intruder_altitude_ft + g.intruder_vertical_rate_fpm * g.tau_s / 60.0;
  const double own_coast = g.own_altitude_ft + g.own_vertical_rate_fpm * coast_min;
  const double up = std::abs(own_coast + cfg.ra_weak_fpm * manoeuvre_min - intruder_cpa);
  const double down = std::abs(own_coast - cfg.ra_weak_fpm * manoeuvre_min - intruder_cpa);
  if (up > down) return Sense::climb;
  if (down > up) return Sense::descend;
  return g.own_altitude_ft >= g.intruder_altitude_ft ? Sense::climb : Sense::descend;
}

inline Advisory select_ra(const RaGeometry& g, const TcasConfig& cfg) { return ra_for_sense(best_sense(g, cfg), g, cfg); }

/// Applies coordination precedence. A complement received before the own
/// candidate, or at the same instant from a lower address, dictates the
/// sense; otherwise the own candidate stands.
inline Advisory coordinate_ra(modes::IcaoAddress own_icao, const Advisory& candidate, const std::optional<ReceivedRac>& received,
                              const RaGeometry& g, const TcasConfig& cfg) {
  if (!received || received->rac == 0) return candidate;
  const bool dnpa = received->rac & modes::rac::kDoNotPassAbove;
  const bool dnpb = received->rac & modes::rac::kDoNotPassBelow;
  if (dnpa && dnpb)
    throw Error(ErrorCode::coordination_conflict, "complement from " + received->from.hex() + " forbids both senses");
  const bool theirs_first = received->received_ns < candidate.issued_at_ns ||
                            (received->received_ns == candidate.issued_at_ns && received->from < own_icao);
  if (!theirs_first) return candidate;
  if (!dnpa && !dnpb) return candidate;
  Advisory a = ra_for_sense(dnpa ? Sense::descend : Sense::climb, g, cfg);
  a.issued_at_ns = candidate.issued_at_ns;
  a.initiator = candidate.initiator;
  a.intruder = candidate.intruder;
  a.coordinated = true;
  return a;
}

struct PilotCommand {
  TimeNs apply_at_ns = 0;
  double vertical_rate_fpm = 0.0;
  std::optional<double> level_off_ft;
};

/// RA -> constant-rate manoeuvre after the response delay. TA -> nothing.
inline std::optional<PilotCommand> pilot_response(const Advisory& advisory, const TcasConfig& cfg) {
  if (advisory.kind != AdvisoryKind::ra) return std::nullopt;
  PilotCommand cmd;
  cmd.apply_at_ns = advisory.issued_at_ns + cfg.pilot_delay_ns;
  if (advisory.sense == Sense::maintain || advisory.sense == Sense::none) {
    cmd.vertical_rate_fpm = 0.0;
    return cmd;
  }
  cmd.vertical_rate_fpm = advisory.strength_fpm;
  cmd.level_off_ft = advisory.altitude_limit_ft;
  return cmd;
}

inline constexpr double kNmacVerticalFt = 100.0;
inline constexpr double kNmacHorizontalFt = 500.0;

inline bool nmac_check(const sim::AircraftState& a, const sim::AircraftState& b) {
  constexpr double eps = 1e-9;
  const double dz = std::abs(a.position.altitude_ft - b.position.altitude_ft);
  const double dh = sim::horizontal_distance_nmi(a.position, b.position) * units::kFeetPerNmi;
  return dz <= kNmacVerticalFt + eps && dh <= kNmacHorizontalFt + eps;
}

}  // namespace tcasim::tcas
