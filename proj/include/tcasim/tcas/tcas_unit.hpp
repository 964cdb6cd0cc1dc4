#pragma once

#include <map>
#include <optional>
#include <string>

#include "tcasim/modes/codec.hpp"
#include "tcasim/sim/event.hpp"
#include "tcasim/tcas/logic.hpp"

namespace tcasim::tcas {

/// Side effects a TCAS unit needs from whatever drives it.
class TcasHost {
 public:
  virtual ~TcasHost() = default;
  virtual void send(modes::ModeSFrame frame, sim::MessageClass cls, const std::string& destination, TimeNs at) = 0;
  virtual void schedule_surveillance(TimeNs at, std::uint64_t token) = 0;
  virtual void log(TimeNs t, const std::string& kind, const std::string& destination, const std::string& frame,
                   const std::string& outcome) = 0;
  virtual void advisory_issued(const Advisory&) {}
  virtual void advisory_cleared(const Advisory&, TimeNs) {}
  virtual std::optional<double> truth_range_nmi(modes::IcaoAddress, TimeNs) const { return std::nullopt; }
};

/// Surveillance, tracking and advisory state machine for one aircraft.
class TcasUnit {
 public:
  TcasUnit(modes::IcaoAddress own, SensitivityLevel sl, TcasConfig cfg, TcasHost& host)
      : own_(own), sl_(sl), cfg_(cfg), host_(host) {}

  modes::IcaoAddress own() const { return own_; }
  SensitivityLevel sensitivity() const { return sl_; }
  const TcasConfig& config() const { return cfg_; }
  const std::map<modes::IcaoAddress, Track>& tracks() const { return tracks_; }
  const std::optional<Advisory>& active_ra() const { return active_ra_; }

  const Track* track(modes::IcaoAddress icao) const {
    auto it = tracks_.find(icao);
    return it == tracks_.end() ? nullptr : &it->second;
  }

  std::uint8_t complement_toward(modes::IcaoAddress icao) const {
    auto it = complements_.find(icao);
    return it == complements_.end() ? 0 : it->second;
  }

  static modes::IcaoAddress token_address(std::uint64_t token) { return modes::IcaoAddress(token & 0xFFFFFF); }
  static std::uint32_t token_generation(std::uint64_t token) { return static_cast<std::uint32_t>((token >> 24) & 0xFFFFFF); }

  void on_downlink(const modes::ModeSFrame& frame, TimeNs rx_ns, const sim::AircraftState& own_state) {
    if (!sl_.tracking() || frame.direction() != modes::Direction::downlink) return;
    const auto df = frame.format_code();
    if (df == 11 || df == 17) {
      auto r = modes::parse_frame(frame);
      if (!modes::decoded_ok(r)) return;
      const auto addr = std::get<modes::DecodedMessage>(r).address;
      if (addr == own_ || addr.is_all_call() || tracks_.contains(addr)) return;
      acquire(addr, rx_ns);
      return;
    }
    if (df != 0 && df != 16) return;
    const modes::IcaoAddress addr((modes::crc24(frame.body()) ^ frame.ap_field()) & 0xFFFFFF);
    auto it = tracks_.find(addr);
    if (it == tracks_.end() || !it->second.pending_tx_ns) return;
    Track& t = it->second;
    const TimeNs tx = *t.pending_tx_ns;
    if (rx_ns - tx > cfg_.listen_window_ns || rx_ns < tx) return;
    auto r = modes::parse_frame(frame, addr);
    if (!modes::decoded_ok(r)) return;
    const auto& msg = std::get<modes::DecodedMessage>(r);
    if (!msg.altitude_ft) return;
    apply_reply(t, tx, rx_ns, *msg.altitude_ft, own_state.position.altitude_ft, cfg_);
    std::string outcome = "update;range_nmi=" + sim::fmt(t.range_nmi, 9) + ";rtt_ns=" + std::to_string(rx_ns - tx) +
                          ";tx_ns=" + std::to_string(tx) + ";altitude_ft=" + sim::fmt(t.altitude_ft, 1);
    if (t.range_rate_kt) outcome += ";range_rate_kt=" + sim::fmt(*t.range_rate_kt, 6);
    if (auto truth = host_.truth_range_nmi(addr, tx)) outcome += ";truth_nmi=" + sim::fmt(*truth, 9);
    host_.log(rx_ns, "track", addr.hex(), "", outcome);
    evaluate(t, rx_ns, own_state);
  }

  void on_surveillance(std::uint64_t token, TimeNs now) {
    auto it = tracks_.find(token_address(token));
    if (it == tracks_.end() || it->second.generation != token_generation(token)) return;
    Track& t = it->second;
    if (t.pending_tx_ns) {
      ++t.consecutive_misses;
      host_.log(now, "track", t.icao.hex(), "", "miss;count=" + std::to_string(t.consecutive_misses));
      if (t.consecutive_misses >= cfg_.miss_limit) {
        remove(it, now, "drop;misses=" + std::to_string(t.consecutive_misses));
        return;
      }
    }
    interrogate(t, now);
  }

  void on_coordination(modes::IcaoAddress sender, std::uint8_t rac, TimeNs rx_ns) {
    if (rac == 0) return;
    host_.log(rx_ns, "coordination", sender.hex(), "", "rac_received;rac=" + std::to_string(rac));
    if (!received_.contains(sender)) received_[sender] = ReceivedRac{rac, sender, rx_ns};
  }

 private:
  using TrackIt = std::map<modes::IcaoAddress, Track>::iterator;

  void acquire(modes::IcaoAddress addr, TimeNs now) {
    if (tracks_.size() >= cfg_.capacity) evict(now);
    Track t;
    t.icao = addr;
    t.created_ns = now;
    t.last_update_ns = now;
    t.generation = next_generation_++ & 0xFFFFFF;
    auto [it, _] = tracks_.emplace(addr, t);
    host_.log(now, "track", addr.hex(), "", "acquire");
    interrogate(it->second, now);
  }

  void interrogate(Track& t, TimeNs now) {
    t.pending_tx_ns = now;
    host_.send(modes::build_interrogation(modes::UplinkFormat::short_surveillance, t.icao), sim::MessageClass::interrogation,
               t.icao.hex(), now);
    host_.schedule_surveillance(now + cfg_.surveillance_period_ns, (static_cast<std::uint64_t>(t.generation) << 24) | t.icao.value());
  }

  /// Largest-range acquiring track first, else largest range overall. A
  /// track without a range counts as infinitely far. Ties: oldest update,
  /// then highest address.
  void evict(TimeNs now) {
    auto pick = [&](bool acquiring_only) {
      TrackIt best = tracks_.end();
      for (auto it = tracks_.begin(); it != tracks_.end(); ++it) {
        const Track& t = it->second;
        if (acquiring_only && t.status != TrackStatus::acquiring) continue;
        if (best == tracks_.end()) {
          best = it;
          continue;
        }
        const double r = t.has_range ? t.range_nmi : kNoThreat;
        const double rb = best->second.has_range ? best->second.range_nmi : kNoThreat;
        if (r > rb || (r == rb && (t.last_update_ns < best->second.last_update_ns ||
                                   (t.last_update_ns == best->second.last_update_ns && t.icao > best->second.icao))))
          best = it;
      }
      return best;
    };
    TrackIt victim = pick(true);
    if (victim == tracks_.end()) victim = pick(false);
    if (victim == tracks_.end()) return;
    const Track& t = victim->second;
    remove(victim, now,
           "evict;status=" + std::string(to_string(t.status)) + (t.has_range ? ";range_nmi=" + sim::fmt(t.range_nmi, 9) : ""));
  }

  void remove(TrackIt it, TimeNs now, const std::string& outcome) {
    if (active_ra_ && active_ra_->intruder == it->first) clear_ra(now);
    complements_.erase(it->first);
    host_.log(now, "track", it->first.hex(), "", outcome);
    tracks_.erase(it);
  }

  void clear_ra(TimeNs now) {
    Advisory a = *active_ra_;
    active_ra_.reset();
    complements_.erase(a.intruder);
    host_.log(now, "advisory", a.intruder.hex(), "", "clear_ra");
    host_.advisory_cleared(a, now);
  }

  void evaluate(Track& t, TimeNs now, const sim::AircraftState& own_state) {
    const ThreatLevel level = threat_detect(t, sl_, cfg_);
    const double tau = t.range_rate_kt ? compute_tau(t.range_nmi, *t.range_rate_kt) : kNoThreat;

    if (t.status == TrackStatus::ra) {
      if (t.range_rate_kt && *t.range_rate_kt >= 0.0) {
        t.status = TrackStatus::tracked;
        clear_ra(now);
      }
      return;
    }
    if (t.status == TrackStatus::ta) {
      if (level == ThreatLevel::ra && !active_ra_) {
        issue_ra(t, now, tau, own_state);
      } else if (level == ThreatLevel::none) {
        t.status = TrackStatus::tracked;
        host_.log(now, "advisory", t.icao.hex(), "", "clear_ta");
      }
      return;
    }
    if (level != ThreatLevel::none) {
      t.status = TrackStatus::ta;
      Advisory a;
      a.kind = AdvisoryKind::ta;
      a.issued_at_ns = now;
      a.initiator = own_;
      a.intruder = t.icao;
      host_.log(now, "advisory", t.icao.hex(), "", "ta;tau_s=" + sim::fmt(tau, 3) + ";rel_alt_ft=" + sim::fmt(t.relative_altitude_ft, 1));
      host_.advisory_issued(a);
    }
  }

  void issue_ra(Track& t, TimeNs now, double tau, const sim::AircraftState& own_state) {
    RaGeometry g{own_state.position.altitude_ft, own_state.velocity.vertical_rate_fpm, t.altitude_ft,
                 t.altitude_rate_fpm.value_or(0.0), tau};
    Advisory a = select_ra(g, cfg_);
    a.issued_at_ns = now;
    a.initiator = own_;
    a.intruder = t.icao;
    std::optional<ReceivedRac> rx;
    if (auto it = received_.find(t.icao); it != received_.end()) rx = it->second;
    try {
      a = coordinate_ra(own_, a, rx, g, cfg_);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::coordination_conflict) throw;
      host_.log(now, "advisory", t.icao.hex(), "", std::string("conflict;reason=") + e.what());
    }
    t.status = TrackStatus::ra;
    active_ra_ = a;
    complements_[t.icao] = a.complement;
    std::string outcome = "ra;sense=" + std::string(to_string(a.sense)) + ";strength_fpm=" + sim::fmt(a.strength_fpm, 1) +
                          ";complement=" + std::to_string(a.complement) + ";coordinated=" + (a.coordinated ? "1" : "0") +
                          ";tau_s=" + sim::fmt(tau, 3);
    if (a.altitude_limit_ft) outcome += ";limit_ft=" + sim::fmt(*a.altitude_limit_ft, 1);
    host_.log(now, "advisory", t.icao.hex(), "", outcome);
    host_.advisory_issued(a);
    const modes::FieldMap mu = {{"uds", modes::kResolutionMessageUds}, {"rac", a.complement}, {"sender", own_.value()}};
    host_.send(modes::build_interrogation(modes::UplinkFormat::long_surveillance, t.icao, mu), sim::MessageClass::coordination,
               t.icao.hex(), now);
  }

  modes::IcaoAddress own_;
  SensitivityLevel sl_;
  TcasConfig cfg_;
  TcasHost& host_;
  std::map<modes::IcaoAddress, Track> tracks_;
  std::map<modes::IcaoAddress, ReceivedRac> received_;
  std::map<modes::IcaoAddress, std::uint8_t> complements_;
  std::optional<Advisory> active_ra_;
  std::uint32_t next_generation_ = 0;
};

}  // namespace tcasim::tcas
