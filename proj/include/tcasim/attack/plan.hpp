#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <optional>
#include <vector>

#include "tcasim/error.hpp"
#include "tcasim/modes/codec.hpp"
#include "tcasim/sim/kinematics.hpp"
#include "tcasim/tcas/logic.hpp"
#include "tcasim/units.hpp"

namespace tcasim::attack {

/// Apparent trajectory of the phantom relative to the victim.
struct SpoofPlan {
  double r0_nmi = 10.0;
  double closure_kt = 480.0;
  double altitude_ft = 0.0;
  std::uint8_t rac = modes::rac::kDoNotPassAbove;

  void validate() const {
    if (!(r0_nmi >= 0.0) || !std::isfinite(r0_nmi)) throw Error(ErrorCode::parameter, "plan r0 must be finite and >= 0");
    if (!std::isfinite(closure_kt)) throw Error(ErrorCode::parameter, "plan closure must be finite");
    if (altitude_ft < 0.0 || altitude_ft > modes::kMaxAltitudeFt) throw Error(ErrorCode::range, "plan altitude out of range");
    if (rac != modes::rac::kDoNotPassAbove && rac != modes::rac::kDoNotPassBelow)
      throw Error(ErrorCode::parameter, "plan complement must be a single sense");
  }

  /// |r0 - closure t|: the phantom passes the victim and then recedes.
  double range_at(double t_s) const { return std::abs(r0_nmi - closure_kt * t_s / 3600.0); }

  /// Closing rate of the apparent range at t (negative while approaching).
  double range_rate_at(double t_s) const { return r0_nmi - closure_kt * t_s / 3600.0 > 0.0 ? -closure_kt : closure_kt; }
};

/// Round-trip time a transponder at `range_nmi` would produce, excluding turnaround.
inline double two_way_time_ns(double range_nmi) { return 2.0 * units::light_time_ns(range_nmi); }

/// Extra reply latency making a transponder at `true_nmi` appear at
/// `desired_nmi`. Negative values are only returned when early replies
/// are allowed.
inline TimeNs compute_reply_delay(double true_nmi, double desired_nmi, bool allow_early = false) {
  const auto extra = static_cast<TimeNs>(std::llround(two_way_time_ns(desired_nmi - true_nmi)));
  if (extra < 0 && !allow_early)
    throw Error(ErrorCode::infeasible_spoof, "desired range " + std::to_string(desired_nmi) + " nmi is inside the true distance " +
                                                 std::to_string(true_nmi) + " nmi");
  return extra;
}

/// Learns an interrogation period from arrival instants: median of the last
/// `window` intervals, usable once at least three instants are seen and the
/// interval spread is within tolerance.
class PeriodLearner {
 public:
  explicit PeriodLearner(std::size_t window = 5, TimeNs jitter_tolerance_ns = units::kNsPerMicrosecond)
      : window_(window), tolerance_(jitter_tolerance_ns) {}

  void observe(TimeNs t) {
    if (last_ && t <= *last_) throw Error(ErrorCode::parameter, "observations must be strictly increasing");
    if (last_) {
      intervals_.push_back(t - *last_);
      if (intervals_.size() > window_) intervals_.pop_front();
    }
    last_ = t;
    ++count_;
  }

  void reset() {
    intervals_.clear();
    last_.reset();
    count_ = 0;
  }

  std::size_t observations() const { return count_; }
  std::optional<TimeNs> last() const { return last_; }

  TimeNs jitter() const {
    if (intervals_.empty()) return 0;
    auto [lo, hi] = std::minmax_element(intervals_.begin(), intervals_.end());
    return *hi - *lo;
  }

  bool available() const { return count_ >= 3 && jitter() <= tolerance_; }

  TimeNs period() const {
    if (count_ < 3) throw Error(ErrorCode::prediction_unavailable, "fewer than three interrogations observed");
    if (jitter() > tolerance_)
      throw Error(ErrorCode::prediction_unavailable, "interval jitter " + std::to_string(jitter()) + " ns exceeds tolerance");
    std::vector<TimeNs> v(intervals_.begin(), intervals_.end());
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2;
  }

  /// First predicted instant strictly after `after`.
  TimeNs predict_next(TimeNs after) const {
    const TimeNs p = period();
    TimeNs t = *last_ + p;
    if (t <= after) t += ((after - t) / p + 1) * p;
    return t;
  }

 private:
  std::size_t window_;
  TimeNs tolerance_;
  std::deque<TimeNs> intervals_;
  std::optional<TimeNs> last_;
  std::size_t count_ = 0;
};

struct PositionFix {
  TimeNs t_ns = 0;
  sim::Position position;
};

/// Constant-velocity course from a least-squares fit.
struct TrajectoryEstimate {
  TimeNs reference_ns = 0;
  sim::Position reference;
  sim::Velocity velocity;

  sim::Position position_at(TimeNs t) const {
    const double dt = units::seconds(t - reference_ns);
    return {reference.x_nmi + velocity.vx_kt * dt / 3600.0, reference.y_nmi + velocity.vy_kt * dt / 3600.0,
            std::max(0.0, reference.altitude_ft + velocity.vertical_rate_fpm * dt / 60.0)};
  }
  double ground_speed_kt() const { return std::hypot(velocity.vx_kt, velocity.vy_kt); }
};

inline TrajectoryEstimate estimate_trajectory(const std::vector<PositionFix>& fixes) {
  if (fixes.size() < 2) throw Error(ErrorCode::insufficient_data, "trajectory fit needs at least two observations");
  const TimeNs t0 = fixes.front().t_ns;
  double mt = 0, mx = 0, my = 0, mz = 0;
  for (const auto& f : fixes) {
    mt += units::seconds(f.t_ns - t0);
    mx += f.position.x_nmi;
    my += f.position.y_nmi;
    mz += f.position.altitude_ft;
  }
  const double n = static_cast<double>(fixes.size());
  mt /= n;
  mx /= n;
  my /= n;
  mz /= n;
  double stt = 0, stx = 0, sty = 0, stz = 0;
  for (const auto& f : fixes) {
    const double dt = units::seconds(f.t_ns - t0) - mt;
    stt += dt * dt;
    stx += dt * (f.position.x_nmi - mx);
    sty += dt * (f.position.y_nmi - my);
    stz += dt * (f.position.altitude_ft - mz);
  }
  if (stt <= 0.0) throw Error(ErrorCode::insufficient_data, "trajectory fit needs observations at distinct times");
  TrajectoryEstimate est;
  est.velocity = {stx / stt * 3600.0, sty / stt * 3600.0, stz / stt * 60.0};
  // Anchor at the latest fix so extrapolation starts from recent data.
  const TimeNs ref = fixes.back().t_ns;
  const double dref = units::seconds(ref - t0) - mt;
  est.reference_ns = ref;
  est.reference = {mx + stx / stt * dref, my + sty / stt * dref, mz + stz / stt * dref};
  return est;
}

struct ReconEntry {
  modes::IcaoAddress icao;
  double range_nmi = 0.0;
  std::optional<double> altitude_ft;
  TimeNs observed_ns = 0;
};

/// Observation set built from all-call replies and altitude follow-ups.
class Reconnaissance {
 public:
  explicit Reconnaissance(TimeNs turnaround_ns = 128 * units::kNsPerMicrosecond) : turnaround_(turnaround_ns) {}

  /// Returns true the first time an address is seen.
  bool on_all_call_reply(modes::IcaoAddress icao, TimeNs tx_ns, TimeNs rx_ns) {
    const double r = tcas::range_from_rtt(rx_ns - tx_ns, turnaround_);
    auto [it, fresh] = entries_.try_emplace(icao, ReconEntry{icao, r, std::nullopt, rx_ns});
    if (!fresh) {
      it->second.range_nmi = r;
      it->second.observed_ns = rx_ns;
    }
    return fresh;
  }

  void on_altitude(modes::IcaoAddress icao, double altitude_ft) {
    if (auto it = entries_.find(icao); it != entries_.end()) it->second.altitude_ft = altitude_ft;
  }

  std::vector<ReconEntry> entries() const {
    std::vector<ReconEntry> out;
    for (const auto& [_, e] : entries_) out.push_back(e);
    return out;
  }

  bool contains(modes::IcaoAddress icao) const { return entries_.contains(icao); }
  std::size_t size() const { return entries_.size(); }

 private:
  TimeNs turnaround_;
  std::map<modes::IcaoAddress, ReconEntry> entries_;
};

/// Transmit instant of an early reply that makes the victim measure the
/// plan range for an interrogation sent at `predicted_tx_ns`.
inline TimeNs predictive_reply_time(TimeNs predicted_tx_ns, double desired_range_nmi, TimeNs turnaround_ns,
                                    TimeNs downlink_delay_ns) {
  return predicted_tx_ns + turnaround_ns + static_cast<TimeNs>(std::llround(two_way_time_ns(desired_range_nmi))) -
         downlink_delay_ns;
}

/// Phantom ICAO one below the victim; clamped so it stays a valid nonzero address.
inline modes::IcaoAddress choose_phantom_icao(modes::IcaoAddress victim) {
  return modes::IcaoAddress(victim.value() > 1 ? victim.value() - 1 : 1);
}

}  // namespace tcasim::attack
