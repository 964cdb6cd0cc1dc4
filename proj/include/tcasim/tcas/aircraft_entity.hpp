#pragma once

#include <algorithm>
#include <cmath>
#include <memory>

#include "tcasim/sim/world.hpp"
#include "tcasim/tcas/tcas_unit.hpp"

namespace tcasim::tcas {

struct AircraftConfig {
  sim::AircraftState initial;
  TimeNs squitter_offset_ns = 0;
  TimeNs squitter_period_ns = units::kNsPerSecond;
  TcasConfig tcas;
};

/// Altitude as carried in replies: nearest 25 ft step within the codable range.
inline int reported_altitude_ft(double altitude_ft) {
  const double clamped = std::clamp(altitude_ft, 0.0, static_cast<double>(modes::kMaxAltitudeFt));
  return static_cast<int>(std::lround(clamped / modes::kAltitudeStepFt)) * modes::kAltitudeStepFt;
}

/// An aircraft: piecewise-linear motion, Mode S transponder, TCAS unit and a
/// deterministic pilot.
class AircraftEntity : public sim::Entity, private TcasHost {
 public:
  explicit AircraftEntity(const AircraftConfig& cfg)
      : cfg_(cfg),
        base_(cfg.initial),
        tcas_(cfg.initial.icao, SensitivityLevel::from(cfg.initial.transponder_mode), cfg.tcas, *this) {}

  std::string name() const override { return base_.icao.hex(); }
  modes::IcaoAddress icao() const { return base_.icao; }
  const TcasUnit& tcas() const { return tcas_; }

  sim::Position position_at(TimeNs t) const override { return state_at(t).position; }
  std::optional<sim::AircraftState> aircraft_state(TimeNs t) const override { return state_at(t); }

  sim::AircraftState state_at(TimeNs t) const {
    sim::AircraftState s = base_;
    const double dt = units::seconds(t - base_time_);
    s.position.x_nmi += base_.velocity.vx_kt * dt / 3600.0;
    s.position.y_nmi += base_.velocity.vy_kt * dt / 3600.0;
    s.position.altitude_ft = std::max(0.0, base_.position.altitude_ft + base_.velocity.vertical_rate_fpm * dt / 60.0);
    return s;
  }

  void start(sim::World& w) override {
    world_ = &w;
    w.schedule_timer(id(), cfg_.squitter_offset_ns, tag(Timer::squitter, 0));
  }

  void on_receive(sim::World& w, const sim::Delivery& d) override {
    world_ = &w;
    if (d.frame.direction() == modes::Direction::uplink)
      transponder(w, d);
    else
      tcas_.on_downlink(d.frame, d.rx_time_ns, state_at(d.rx_time_ns));
  }

  void on_timer(sim::World& w, std::uint64_t t) override {
    world_ = &w;
    const auto kind = static_cast<Timer>(t >> 56);
    const std::uint64_t payload = t & ((1ull << 56) - 1);
    switch (kind) {
      case Timer::squitter: {
        auto df11 = modes::build_reply(modes::DownlinkFormat::all_call_reply, base_.icao, 0, {{"ca", 5}});
        emit(w, std::move(df11), sim::MessageClass::squitter, "*", w.now());
        w.schedule_timer(id(), w.now() + cfg_.squitter_period_ns, tag(Timer::squitter, 0));
        break;
      }
      case Timer::surveillance: tcas_.on_surveillance(payload, w.now()); break;
      case Timer::pilot_start:
        if (payload == pilot_generation_) begin_manoeuvre(w);
        break;
      case Timer::level_off:
        if (payload == pilot_generation_) level_off(w);
        break;
    }
  }

 private:
  enum class Timer : std::uint8_t { squitter = 1, surveillance = 2, pilot_start = 3, level_off = 4 };

  static std::uint64_t tag(Timer kind, std::uint64_t payload) { return (static_cast<std::uint64_t>(kind) << 56) | payload; }

  void emit(sim::World& w, modes::ModeSFrame frame, sim::MessageClass cls, std::string dest, TimeNs at) {
    sim::Transmission tx{std::move(frame), cls, std::move(dest), std::nullopt};
    if (tx.frame.direction() == modes::Direction::downlink) tx.source_icao = base_.icao;
    w.transmit(id(), std::move(tx), at);
  }

  void transponder(sim::World& w, const sim::Delivery& d) {
    const auto uf = d.frame.format_code();
    const TimeNs reply_at = d.rx_time_ns + cfg_.tcas.turnaround_ns;
    const std::string interrogator = w.entity(d.from).name();
    const int alt = reported_altitude_ft(state_at(d.rx_time_ns).position.altitude_ft);
    if (uf == static_cast<std::uint8_t>(modes::UplinkFormat::all_call)) {
      if (!modes::decoded_ok(modes::parse_frame(d.frame))) return;
      emit(w, modes::build_reply(modes::DownlinkFormat::all_call_reply, base_.icao, 0, {{"ca", 5}}), sim::MessageClass::reply,
           interrogator, reply_at);
      return;
    }
    if (uf != 0 && uf != 16) return;
    auto r = modes::parse_frame(d.frame, base_.icao);
    if (!modes::decoded_ok(r)) return;
    const auto& msg = std::get<modes::DecodedMessage>(r);
    const std::uint32_t sl = static_cast<std::uint32_t>(tcas_.sensitivity().level);
    if (uf == 0) {
      emit(w, modes::build_reply(modes::DownlinkFormat::short_surveillance, base_.icao, alt, {{"sl", sl}}),
           sim::MessageClass::reply, interrogator, reply_at);
      return;
    }
    const modes::IcaoAddress sender(msg.field("sender"));
    if (msg.field("uds") == modes::kResolutionMessageUds) tcas_.on_coordination(sender, static_cast<std::uint8_t>(msg.field("rac")), d.rx_time_ns);
    const modes::FieldMap mv = {{"sl", sl},
                                {"uds", modes::kResolutionMessageUds},
                                {"rac", tcas_.complement_toward(sender)},
                                {"sender", base_.icao.value()}};
    emit(w, modes::build_reply(modes::DownlinkFormat::long_surveillance, base_.icao, alt, mv), sim::MessageClass::reply,
         interrogator, reply_at);
  }

  void set_vertical_rate(TimeNs t, double fpm) {
    base_ = state_at(t);
    base_time_ = t;
    base_.velocity.vertical_rate_fpm = fpm;
  }

  void begin_manoeuvre(sim::World& w) {
    const TimeNs now = w.now();
    const double alt = state_at(now).position.altitude_ft;
    double rate = pending_.vertical_rate_fpm;
    if (pending_.level_off_ft) {
      const double gap = *pending_.level_off_ft - alt;
      if (gap * rate <= 0.0) rate = 0.0;
    }
    set_vertical_rate(now, rate);
    w.record(now, "pilot", name(), pending_intruder_.hex(), "", "manoeuvre;vertical_rate_fpm=" + sim::fmt(rate, 1));
    if (rate != 0.0 && pending_.level_off_ft) {
      const double minutes = (*pending_.level_off_ft - alt) / rate;
      const auto dt = static_cast<TimeNs>(std::ceil(minutes * 60.0 * 1e9));
      w.schedule_timer(id(), now + dt, tag(Timer::level_off, pilot_generation_));
    }
  }

  void level_off(sim::World& w) {
    const TimeNs now = w.now();
    set_vertical_rate(now, 0.0);
    if (pending_.level_off_ft) base_.position.altitude_ft = *pending_.level_off_ft;
    w.record(now, "pilot", name(), pending_intruder_.hex(), "", "level_off;altitude_ft=" + sim::fmt(base_.position.altitude_ft, 1));
  }

  // TcasHost
  void send(modes::ModeSFrame frame, sim::MessageClass cls, const std::string& destination, TimeNs at) override {
    emit(*world_, std::move(frame), cls, destination, at);
  }
  void schedule_surveillance(TimeNs at, std::uint64_t token) override {
    world_->schedule_timer(id(), at, tag(Timer::surveillance, token));
  }
  void log(TimeNs t, const std::string& kind, const std::string& destination, const std::string& frame,
           const std::string& outcome) override {
    world_->record(t, kind, name(), destination, frame, outcome);
  }
  void advisory_issued(const Advisory& a) override {
    auto cmd = pilot_response(a, cfg_.tcas);
    if (!cmd) return;
    ++pilot_generation_;
    pending_ = *cmd;
    pending_intruder_ = a.intruder;
    world_->schedule_timer(id(), cmd->apply_at_ns, tag(Timer::pilot_start, pilot_generation_));
  }
  void advisory_cleared(const Advisory& a, TimeNs now) override {
    ++pilot_generation_;
    set_vertical_rate(now, 0.0);
    world_->record(now, "pilot", name(), a.intruder.hex(), "", "hold;altitude_ft=" + sim::fmt(base_.position.altitude_ft, 1));
  }
  std::optional<double> truth_range_nmi(modes::IcaoAddress target, TimeNs t) const override {
    return world_->truth_range_nmi(target, id(), t);
  }

  AircraftConfig cfg_;
  sim::AircraftState base_;
  TimeNs base_time_ = 0;
  TcasUnit tcas_;
  sim::World* world_ = nullptr;
  std::uint64_t pilot_generation_ = 0;
  PilotCommand pending_;
  modes::IcaoAddress pending_intruder_;
};

}  // namespace tcasim::tcas
