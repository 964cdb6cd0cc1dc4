#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tcasim/attack/flood.hpp"
#include "tcasim/attack/phantom.hpp"
#include "tcasim/harness/metrics.hpp"
#include "tcasim/harness/scenario.hpp"
#include "tcasim/tcas/aircraft_entity.hpp"

namespace tcasim::harness {

/// Samples ground truth and logs the first NMAC of every aircraft pair.
class NmacMonitor : public sim::Entity {
 public:
  explicit NmacMonitor(TimeNs period_ns = 100 * units::kNsPerSecond / 1000) : period_(period_ns) {}

  std::string name() const override { return "monitor"; }
  sim::Position position_at(TimeNs) const override { return {}; }
  bool listening() const override { return false; }

  void start(sim::World& w) override { w.schedule_timer(id(), 0, 0); }

  void on_timer(sim::World& w, std::uint64_t) override {
    const auto states = w.aircraft_states(w.now());
    for (std::size_t i = 0; i < states.size(); ++i)
      for (std::size_t j = i + 1; j < states.size(); ++j) {
        const auto key = std::make_pair(states[i].icao, states[j].icao);
        if (seen_.contains(key) || !tcas::nmac_check(states[i], states[j])) continue;
        seen_.insert(key);
        const double dz = std::abs(states[i].position.altitude_ft - states[j].position.altitude_ft);
        const double dh = sim::horizontal_distance_nmi(states[i].position, states[j].position) * units::kFeetPerNmi;
        w.record(w.now(), "nmac", states[i].icao.hex(), states[j].icao.hex(), "",
                 "nmac;dalt_ft=" + sim::fmt(dz, 1) + ";dh_ft=" + sim::fmt(dh, 1) +
                     ";alt_a_ft=" + sim::fmt(states[i].position.altitude_ft, 1) +
                     ";alt_b_ft=" + sim::fmt(states[j].position.altitude_ft, 1));
      }
    w.schedule_timer(id(), w.now() + period_, 0);
  }

 private:
  TimeNs period_;
  std::set<std::pair<modes::IcaoAddress, modes::IcaoAddress>> seen_;
};

/// A fully wired world for one scenario run.
struct Simulation {
  std::unique_ptr<sim::World> world;
  std::vector<tcas::AircraftEntity*> aircraft;
  attack::PhantomAttacker* phantom = nullptr;
  attack::SquitterFlood* squitter_flood = nullptr;
  attack::AllCallFlood* all_call_flood = nullptr;

  tcas::AircraftEntity* find(modes::IcaoAddress icao) const {
    for (auto* a : aircraft)
      if (a->icao() == icao) return a;
    return nullptr;
  }
};

inline phy::LinkConfig link_for(const ChannelSpec& c) {
  phy::LinkConfig link;
  link.snr_db = c.awgn ? c.snr_db : phy::kNoNoise;
  link.samples_per_chip = c.samples_per_chip;
  return link;
}

inline Simulation build_simulation(const Scenario& s, std::optional<std::uint64_t> seed_override = std::nullopt) {
  sim::WorldConfig wc;
  wc.link = link_for(s.channel);
  wc.seed = seed_override.value_or(s.seed.value_or(0));
  Simulation out;
  out.world = std::make_unique<sim::World>(wc);
  sim::World& w = *out.world;

  tcas::TcasConfig tc;
  tc.surveillance_period_ns = s.surveillance_period_ns();
  std::set<std::uint32_t> real;
  for (const auto& a : s.aircraft) {
    tcas::AircraftConfig ac;
    ac.initial = a.state;
    ac.squitter_offset_ns = a.squitter_offset_ns;
    ac.tcas = tc;
    out.aircraft.push_back(&w.add(std::make_unique<tcas::AircraftEntity>(ac)));
    real.insert(a.state.icao.value());
  }

  const AttackerSpec& atk = s.attacker;
  switch (atk.kind) {
    case AttackKind::none: break;
    case AttackKind::phantom: {
      attack::PhantomConfig pc;
      pc.position = atk.position;
      pc.velocity = atk.velocity;
      pc.victim = atk.victim;
      pc.phantom_icao = atk.phantom_icao;
      pc.plan = atk.plan;
      pc.prediction = atk.prediction;
      pc.recon_rounds = atk.recon_rounds;
      pc.bait_timeout_ns = units::from_seconds(atk.bait_timeout_s);
      pc.evidence_timeout_ns = units::from_seconds(atk.evidence_timeout_s);
      pc.threat_model = tc;
      out.phantom = &w.add(std::make_unique<attack::PhantomAttacker>(pc));
      break;
    }
    case AttackKind::squitter_flood:
    case AttackKind::all_call_flood: {
      attack::FloodConfig fc;
      fc.position = atk.position;
      fc.rate_hz = atk.flood.rate_hz;
      fc.start_ns = units::from_seconds(atk.flood.start_s);
      fc.duration_ns = units::from_seconds(atk.flood.duration_s);
      fc.respond = atk.flood.respond;
      fc.altitude_ft = atk.flood.altitude_ft;
      if (atk.kind == AttackKind::squitter_flood)
        out.squitter_flood =
            &w.add(std::make_unique<attack::SquitterFlood>(fc, attack::AddressStream(atk.flood.stream_a, atk.flood.stream_b, real)));
      else
        out.all_call_flood = &w.add(std::make_unique<attack::AllCallFlood>(fc));
      break;
    }
  }
  for (const auto& j : atk.jam) w.add_jam(sim::JamDirective(j.target, units::from_seconds(j.start_s), units::from_seconds(j.end_s)));
  w.add(std::make_unique<NmacMonitor>());
  return out;
}

struct SimulationResult {
  sim::EventLog log;
  MetricsReport metrics;
  PredicateResult success;
  bool aborted = false;
  std::string abort_message;
};

/// Runs a scenario to its horizon. A handler fault ends the run early; the
/// partial log is kept.
inline SimulationResult simulate(const Scenario& s, std::optional<std::uint64_t> seed_override = std::nullopt) {
  Simulation sim = build_simulation(s, seed_override);
  SimulationResult r;
  try {
    sim.world->run_until(s.duration_ns());
  } catch (const Error& e) {
    if (e.code() != ErrorCode::simulation_abort) throw;
    r.aborted = true;
    r.abort_message = e.what();
  }
  r.log = sim.world->log();
  r.metrics = compute_metrics(r.log);
  r.success = evaluate_success(s.success, r.metrics);
  return r;
}

}  // namespace tcasim::harness
