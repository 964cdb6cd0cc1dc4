#pragma once

#include <cmath>
#include <set>
#include <string>

#include "tcasim/sim/world.hpp"

namespace tcasim::attack {

/// Never-repeating pseudo-random 24-bit addresses: a*i + b mod 2^24 with a
/// odd is a bijection, so each address appears at most once per 2^24 draws.
/// Excluded addresses (and 0 and the all-call address) are skipped.
class AddressStream {
 public:
  static constexpr std::uint64_t kSpace = 1ull << 24;

  explicit AddressStream(std::uint32_t a = 0x9E3779u | 1u, std::uint32_t b = 0x2545F4u, std::set<std::uint32_t> exclude = {})
      : a_((a | 1u) & 0xFFFFFF), b_(b & 0xFFFFFF), exclude_(std::move(exclude)) {}

  modes::IcaoAddress next() {
    while (i_ < kSpace) {
      const auto v = static_cast<std::uint32_t>((static_cast<std::uint64_t>(a_) * i_ + b_) % kSpace);
      ++i_;
      if (v == 0 || v == modes::IcaoAddress::kMask || exclude_.contains(v)) continue;
      return modes::IcaoAddress(v);
    }
    throw Error(ErrorCode::address_exhausted, "all 2^24 spoofable addresses used");
  }

  std::uint64_t drawn() const { return i_; }

 private:
  std::uint32_t a_;
  std::uint32_t b_;
  std::set<std::uint32_t> exclude_;
  std::uint64_t i_ = 0;
};

/// Instant of the k-th emission of a periodic schedule at `rate_hz`.
inline TimeNs schedule_instant(TimeNs start_ns, double rate_hz, std::uint64_t k) {
  if (!(rate_hz > 0.0)) throw Error(ErrorCode::parameter, "flood rate must be positive");
  return start_ns + static_cast<TimeNs>(std::llround(static_cast<double>(k) * 1e9 / rate_hz));
}

struct FloodConfig {
  sim::Position position;
  double rate_hz = 10.0;
  TimeNs start_ns = 0;
  TimeNs duration_ns = 10 * units::kNsPerSecond;
  /// Squitter flood: answer surveillance of the spoofed addresses.
  bool respond = true;
  double altitude_ft = 0.0;
  TimeNs turnaround_ns = 128 * units::kNsPerMicrosecond;
};

/// Emits an acquisition squitter from a fresh spoofed address at each tick.
class SquitterFlood : public sim::Entity {
 public:
  SquitterFlood(FloodConfig cfg, AddressStream stream) : cfg_(cfg), stream_(std::move(stream)) {}

  std::string name() const override { return "attacker"; }
  sim::Position position_at(TimeNs) const override { return cfg_.position; }
  const std::set<modes::IcaoAddress>& spoofed() const { return spoofed_; }

  void start(sim::World& w) override {
    if (cfg_.rate_hz > 0.0 && cfg_.duration_ns > 0) w.schedule_timer(id(), cfg_.start_ns, 0);
    w.record(w.now(), "attack", name(), "*", "", "squitter_flood;rate_hz=" + sim::fmt(cfg_.rate_hz, 3));
  }

  void on_timer(sim::World& w, std::uint64_t k) override {
    const auto addr = stream_.next();
    spoofed_.insert(addr);
    w.transmit(id(), {modes::build_reply(modes::DownlinkFormat::all_call_reply, addr, 0, {{"ca", 5}}), sim::MessageClass::squitter, "*", addr},
               w.now());
    const TimeNs next = schedule_instant(cfg_.start_ns, cfg_.rate_hz, k + 1);
    if (next < cfg_.start_ns + cfg_.duration_ns) w.schedule_timer(id(), next, k + 1);
  }

  void on_receive(sim::World& w, const sim::Delivery& d) override {
    if (!cfg_.respond || d.frame.direction() != modes::Direction::uplink || d.frame.format_code() != 0) return;
    const modes::IcaoAddress addr((modes::crc24(d.frame.body()) ^ d.frame.ap_field()) & 0xFFFFFF);
    if (!spoofed_.contains(addr)) return;
    const int alt = static_cast<int>(std::lround(cfg_.altitude_ft));
    w.transmit(id(), {modes::build_reply(modes::DownlinkFormat::short_surveillance, addr, alt, {{"sl", 3}}), sim::MessageClass::reply,
                      w.entity(d.from).name(), addr},
               d.rx_time_ns + cfg_.turnaround_ns);
  }

 private:
  FloodConfig cfg_;
  AddressStream stream_;
  std::set<modes::IcaoAddress> spoofed_;
};

/// Emits all-call interrogations at a fixed rate.
class AllCallFlood : public sim::Entity {
 public:
  explicit AllCallFlood(FloodConfig cfg) : cfg_(cfg) {}

  std::string name() const override { return "attacker"; }
  sim::Position position_at(TimeNs) const override { return cfg_.position; }

  void start(sim::World& w) override {
    if (cfg_.rate_hz > 0.0 && cfg_.duration_ns > 0) w.schedule_timer(id(), cfg_.start_ns, 0);
    w.record(w.now(), "attack", name(), "*", "", "all_call_flood;rate_hz=" + sim::fmt(cfg_.rate_hz, 3));
  }

  void on_timer(sim::World& w, std::uint64_t k) override {
    w.transmit(id(), {modes::build_interrogation(modes::UplinkFormat::all_call, modes::IcaoAddress::all_call()),
                      sim::MessageClass::interrogation, "*", std::nullopt},
               w.now());
    const TimeNs next = schedule_instant(cfg_.start_ns, cfg_.rate_hz, k + 1);
    if (next < cfg_.start_ns + cfg_.duration_ns) w.schedule_timer(id(), next, k + 1);
  }

 private:
  FloodConfig cfg_;
};

}  // namespace tcasim::attack
