#pragma once

#include <memory>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "tcasim/modes/crc.hpp"
#include "tcasim/phy/channel.hpp"
#include "tcasim/sim/event.hpp"
#include "tcasim/sim/kinematics.hpp"

namespace tcasim::sim {

class World;

enum class ReceptionStatus { ok, corrupt, missed };

constexpr const char* to_string(ReceptionStatus s) {
  switch (s) {
    case ReceptionStatus::ok: return "ok";
    case ReceptionStatus::corrupt: return "corrupt";
    case ReceptionStatus::missed: return "missed";
  }
  return "?";
}

/// What an entity sees when a transmission reaches it.
struct Delivery {
  const Transmission& tx;
  EntityId from = 0;
  TimeNs tx_time_ns = 0;
  TimeNs rx_time_ns = 0;
  /// Demodulated bits (the transmitted bits on a noiseless channel).
  modes::ModeSFrame frame;
  ReceptionStatus status = ReceptionStatus::ok;
};

class Entity {
 public:
  virtual ~Entity() = default;

  virtual std::string name() const = 0;
  virtual Position position_at(TimeNs t) const = 0;

  /// Ground truth for aircraft; nothing for other entities.
  virtual std::optional<AircraftState> aircraft_state(TimeNs) const { return std::nullopt; }

  /// Range an entity is trying to present for `target`, if it impersonates one.
  virtual std::optional<double> apparent_range_nmi(modes::IcaoAddress, TimeNs) const { return std::nullopt; }

  /// Non-listening entities never get deliveries.
  virtual bool listening() const { return true; }

  virtual void start(World&) {}
  virtual void on_receive(World&, const Delivery&) {}
  virtual void on_timer(World&, std::uint64_t) {}

  EntityId id() const { return id_; }

 private:
  friend class World;
  EntityId id_ = 0;
};

struct WorldConfig {
  double reception_range_nmi = 100.0;
  phy::LinkConfig link;
  std::uint64_t seed = 0;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// On-air length of a burst.
inline TimeNs burst_duration_ns(const modes::ModeSFrame& frame) {
  if (frame.direction() == modes::Direction::downlink) return (8 + static_cast<TimeNs>(frame.size())) * 1000;
  return static_cast<TimeNs>((phy::kPayloadOffsetInBlock + frame.size() + phy::kInterrogationPad) * 250);
}

class World {
 public:
  explicit World(WorldConfig config = {}) : config_(config) {}

  World(const World&) = delete;
  World& operator=(const World&) = delete;

  template <class T>
  T& add(std::unique_ptr<T> entity) {
    T& ref = *entity;
    entity->id_ = static_cast<EntityId>(entities_.size());
    entities_.push_back(std::move(entity));
    return ref;
  }

  void add_jam(const JamDirective& jam) { jams_.push_back(jam); }

  const WorldConfig& config() const { return config_; }
  TimeNs now() const { return now_; }
  std::size_t entity_count() const { return entities_.size(); }
  const Entity& entity(EntityId id) const { return *entities_.at(id); }
  Entity& entity(EntityId id) { return *entities_.at(id); }
  const EventLog& log() const { return log_; }

  void transmit(EntityId source, Transmission tx, TimeNs at) {
    if (at < now_) throw Error(ErrorCode::parameter, "cannot transmit in the past");
    SimEvent ev;
    ev.time_ns = at;
    ev.kind = EventKind::transmit;
    ev.source = source;
    ev.destination = source;
    ev.payload = std::make_shared<const Transmission>(std::move(tx));
    push(std::move(ev));
  }

  void schedule_timer(EntityId owner, TimeNs at, std::uint64_t tag) {
    if (at < now_) throw Error(ErrorCode::parameter, "cannot schedule a timer in the past");
    SimEvent ev;
    ev.time_ns = at;
    ev.kind = EventKind::timer;
    ev.source = owner;
    ev.destination = owner;
    ev.timer_tag = tag;
    push(std::move(ev));
  }

  /// Fans a transmit event out to every in-range receiver. Jammed
  /// deliveries are logged as erasures and not returned.
  std::vector<SimEvent> deliver(const SimEvent& tx) {
    if (tx.kind != EventKind::transmit || !tx.payload) throw Error(ErrorCode::parameter, "deliver expects a transmit event");
    std::vector<SimEvent> out;
    const Position from = entities_[tx.source]->position_at(tx.time_ns);
    const TimeNs duration = burst_duration_ns(tx.payload->frame);
    for (const auto& e : entities_) {
      if (e->id() == tx.source || !e->listening()) continue;
      const Position to = e->position_at(tx.time_ns);
      if (slant_range_nmi(from, to) > config_.reception_range_nmi) continue;
      const TimeNs arrival = tx.time_ns + propagation_delay_ns(from, to);
      if (jammed(*tx.payload, arrival, arrival + duration)) {
        record(arrival, "erase", entities_[tx.source]->name(), e->name(), tx.payload->frame.hex(),
               std::string("jammed:") + to_string(tx.payload->message_class));
        continue;
      }
      SimEvent ev;
      ev.time_ns = arrival;
      ev.kind = EventKind::deliver;
      ev.source = tx.source;
      ev.destination = e->id();
      ev.payload = tx.payload;
      ev.origin_ns = tx.time_ns;
      out.push_back(std::move(ev));
    }
    return out;
  }

  /// Runs every event with time <= t_end, then advances the clock to t_end.
  const EventLog& run_until(TimeNs t_end) {
    if (t_end < now_) throw Error(ErrorCode::parameter, "run_until target lies in the past");
    if (!started_) {
      started_ = true;
      for (auto& e : entities_) guarded(*e, [&] { e->start(*this); });
    }
    while (!queue_.empty() && queue_.top().time_ns <= t_end) {
      SimEvent ev = queue_.top();
      queue_.pop();
      now_ = ev.time_ns;
      dispatch(ev);
    }
    now_ = t_end;
    return log_;
  }

  void record(TimeNs t, std::string kind, std::string source, std::string destination, std::string frame, std::string outcome) {
    log_.push_back({t, std::move(kind), std::move(source), std::move(destination), std::move(frame), std::move(outcome)});
  }

  std::vector<AircraftState> aircraft_states(TimeNs t) const {
    std::vector<AircraftState> out;
    for (const auto& e : entities_)
      if (auto s = e->aircraft_state(t)) out.push_back(*s);
    return out;
  }

  std::optional<AircraftState> aircraft(modes::IcaoAddress icao, TimeNs t) const {
    for (const auto& e : entities_)
      if (auto s = e->aircraft_state(t); s && s->icao == icao) return s;
    return std::nullopt;
  }

  /// Geometric range from `observer` to `target`, or the range an
  /// impersonating entity is presenting for it.
  std::optional<double> truth_range_nmi(modes::IcaoAddress target, EntityId observer, TimeNs t) const {
    const Position here = entities_.at(observer)->position_at(t);
    if (auto s = aircraft(target, t)) return slant_range_nmi(here, s->position);
    for (const auto& e : entities_)
      if (auto r = e->apparent_range_nmi(target, t)) return r;
    return std::nullopt;
  }

 private:
  void push(SimEvent ev) {
    ev.sequence = next_sequence_++;
    queue_.push(std::move(ev));
  }

  bool jammed(const Transmission& tx, TimeNs begin, TimeNs end) const {
    if (!tx.source_icao || tx.frame.direction() != modes::Direction::downlink) return false;
    for (const auto& j : jams_)
      if (j.target == *tx.source_icao && j.overlaps(begin, end)) return true;
    return false;
  }

  template <class F>
  void guarded(Entity& e, F&& f) {
    try {
      f();
    } catch (const std::exception& ex) {
      record(now_, "abort", e.name(), e.name(), "", std::string("fault:") + ex.what());
      throw Error(ErrorCode::simulation_abort, e.name() + ": " + ex.what());
    }
  }

  void dispatch(const SimEvent& ev) {
    Entity& target = *entities_[ev.destination];
    switch (ev.kind) {
      case EventKind::timer:
        guarded(target, [&] { target.on_timer(*this, ev.timer_tag); });
        break;
      case EventKind::transmit: {
        record(ev.time_ns, "transmit", target.name(), ev.payload->destination, ev.payload->frame.hex(),
               to_string(ev.payload->message_class));
        for (auto& d : deliver(ev)) push(std::move(d));
        break;
      }
      case EventKind::deliver: {
        const Transmission& tx = *ev.payload;
        Delivery d{tx, ev.source, ev.origin_ns, ev.time_ns, tx.frame, ReceptionStatus::ok};
        if (!config_.link.noiseless()) receive_over_link(ev, d);
        record(ev.time_ns, "deliver", entities_[ev.source]->name(), target.name(), tx.frame.hex(),
               std::string(to_string(d.status)) + ":" + to_string(tx.message_class) +
                   (tx.destination == "*" ? "" : ";to=" + tx.destination));
        if (d.status != ReceptionStatus::missed) guarded(target, [&] { target.on_receive(*this, d); });
        break;
      }
    }
  }

  void receive_over_link(const SimEvent& ev, Delivery& d) {
    const auto& sent = ev.payload->frame;
    const std::uint64_t seed = splitmix64(config_.seed ^ splitmix64(ev.sequence));
    const auto rx = sent.direction() == modes::Direction::downlink
                        ? phy::receive_reply(sent.bits(), ev.time_ns, config_.link, seed)
                        : phy::receive_interrogation(sent.bits(), ev.time_ns, config_.link, seed);
    if (!rx) {
      d.status = ReceptionStatus::missed;
      return;
    }
    d.rx_time_ns = rx->timestamp_ns;
    d.frame = modes::ModeSFrame(sent.direction(), rx->bits);
    const std::uint32_t overlay_sent = modes::crc24(sent.body()) ^ sent.ap_field();
    const bool same_length = d.frame.size() == sent.size();
    const std::uint32_t overlay_rx = modes::crc24(d.frame.body()) ^ d.frame.ap_field();
    d.status = same_length && overlay_rx == overlay_sent ? ReceptionStatus::ok : ReceptionStatus::corrupt;
  }

  WorldConfig config_;
  std::vector<std::unique_ptr<Entity>> entities_;
  std::vector<JamDirective> jams_;
  std::priority_queue<SimEvent, std::vector<SimEvent>, EventAfter> queue_;
  std::uint64_t next_sequence_ = 0;
  TimeNs now_ = 0;
  bool started_ = false;
  EventLog log_;
};

}  // namespace tcasim::sim
