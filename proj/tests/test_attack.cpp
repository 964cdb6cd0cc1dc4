#include <gtest/gtest.h>

#include <algorithm>

#include "oracles.hpp"
#include "tcasim/attack/flood.hpp"
#include "tcasim/attack/phantom.hpp"
#include "tcasim/harness/simulate.hpp"

using namespace tcasim;
using namespace tcasim::attack;

namespace {

constexpr TimeNs kSec = units::kNsPerSecond;

harness::Scenario scenario(const std::string& name) {
  return harness::load_scenario_file(std::string(TCASIM_SCENARIO_DIR) + "/" + name + ".json");
}

std::vector<sim::LogRecord> records(const sim::EventLog& log, const std::string& kind, const std::string& tag = "") {
  std::vector<sim::LogRecord> out;
  for (const auto& r : log)
    if (r.kind == kind && (tag.empty() || r.tag() == tag)) out.push_back(r);
  return out;
}

// Interrogates a fixed address on a scripted schedule and timestamps replies.
class ScriptedVictim : public sim::Entity {
 public:
  ScriptedVictim(modes::IcaoAddress own, modes::IcaoAddress target, std::vector<TimeNs> schedule)
      : own_(own), target_(target), schedule_(std::move(schedule)) {}

  std::string name() const override { return own_.hex(); }
  sim::Position position_at(TimeNs) const override { return {0, 0, 20000}; }
  std::optional<sim::AircraftState> aircraft_state(TimeNs t) const override {
    sim::AircraftState s;
    s.icao = own_;
    s.position = position_at(t);
    return s;
  }

  void start(sim::World& w) override {
    for (std::size_t i = 0; i < schedule_.size(); ++i) w.schedule_timer(id(), schedule_[i], i);
  }
  void on_timer(sim::World& w, std::uint64_t) override {
    sent.push_back(w.now());
    w.transmit(id(), {modes::build_interrogation(modes::UplinkFormat::short_surveillance, target_), sim::MessageClass::interrogation,
                      target_.hex(), std::nullopt},
               w.now());
  }
  void on_receive(sim::World&, const sim::Delivery& d) override {
    if (d.tx.message_class == sim::MessageClass::reply && d.tx.destination == name()) replies.push_back(d.rx_time_ns);
  }

  std::vector<TimeNs> sent;
  std::vector<TimeNs> replies;

 private:
  modes::IcaoAddress own_;
  modes::IcaoAddress target_;
  std::vector<TimeNs> schedule_;
};

}  // namespace

TEST(ReplyDelay, ExamplesAgainstLightTime) {
  EXPECT_EQ(compute_reply_delay(20, 20), 0);
  EXPECT_EQ(compute_reply_delay(20, 30), std::llround(2 * oracle::light_ns(10)));
  EXPECT_EQ(compute_reply_delay(20, 30), 123552);
  EXPECT_THROW(compute_reply_delay(20, 10), Error);
  EXPECT_EQ(compute_reply_delay(20, 10, true), -123552);
}

TEST(ReplyDelay, InfeasibleCarriesCode) {
  try {
    compute_reply_delay(5, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::infeasible_spoof);
  }
}

TEST(PeriodLearner, LearnsExactPeriod) {
  PeriodLearner l;
  EXPECT_FALSE(l.available());
  for (int i = 0; i < 6; ++i) l.observe(1000 + i * kSec);
  ASSERT_TRUE(l.available());
  EXPECT_EQ(l.period(), kSec);
  EXPECT_EQ(l.predict_next(1000 + 5 * kSec), 1000 + 6 * kSec);
  EXPECT_EQ(l.predict_next(1000 + 8 * kSec + 1), 1000 + 9 * kSec);
}

TEST(PeriodLearner, TooFewObservations) {
  PeriodLearner l;
  l.observe(0);
  l.observe(kSec);
  EXPECT_FALSE(l.available());
  EXPECT_THROW(l.period(), Error);
}

TEST(PeriodLearner, JitterMakesPredictionUnavailable) {
  PeriodLearner l;
  const TimeNs t[] = {0, kSec, 2 * kSec + 50'000, 3 * kSec, 4 * kSec + 50'000};
  for (auto x : t) l.observe(x);
  EXPECT_FALSE(l.available());
  try {
    l.period();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::prediction_unavailable);
  }
  l.reset();
  EXPECT_THROW(l.period(), Error);
}

TEST(Trajectory, StationaryAndConstantVelocity) {
  std::vector<PositionFix> still{{0, {1, 2, 3000}}, {kSec, {1, 2, 3000}}, {2 * kSec, {1, 2, 3000}}};
  auto e = estimate_trajectory(still);
  EXPECT_NEAR(e.ground_speed_kt(), 0.0, 1e-9);
  std::vector<PositionFix> moving;
  for (int i = 0; i < 5; ++i) moving.push_back({i * kSec, {480.0 * i / 3600.0, 0, 30000}});
  auto m = estimate_trajectory(moving);
  EXPECT_NEAR(m.velocity.vx_kt, 480.0, 1e-6);
  EXPECT_NEAR(m.position_at(10 * kSec).x_nmi, 480.0 * 10 / 3600.0, 1e-9);
  EXPECT_THROW(estimate_trajectory({still[0]}), Error);
  EXPECT_THROW(estimate_trajectory({still[0], still[0]}), Error);
}

TEST(Reconnaissance, CountsDistinctAddresses) {
  Reconnaissance r;
  EXPECT_EQ(r.size(), 0u);
  const TimeNs rtt = 128'000 + std::llround(2 * oracle::light_ns(5));
  EXPECT_TRUE(r.on_all_call_reply(modes::IcaoAddress(0xA), 0, rtt));
  EXPECT_TRUE(r.on_all_call_reply(modes::IcaoAddress(0xB), 0, rtt));
  EXPECT_FALSE(r.on_all_call_reply(modes::IcaoAddress(0xA), kSec, kSec + rtt));
  r.on_altitude(modes::IcaoAddress(0xB), 31000);
  auto e = r.entries();
  ASSERT_EQ(e.size(), 2u);
  EXPECT_NEAR(e[0].range_nmi, 5.0, oracle::range_nmi(1, 0));
  EXPECT_EQ(*e[1].altitude_ft, 31000);
}

TEST(PhantomIcao, OneBelowVictim) {
  EXPECT_EQ(choose_phantom_icao(modes::IcaoAddress(0x4840d6)).value(), 0x4840d5u);
  EXPECT_EQ(choose_phantom_icao(modes::IcaoAddress(1)).value(), 1u);
}

TEST(AddressStream, NeverRepeatsAndHonoursExclusions) {
  const std::set<std::uint32_t> excl{0x4840d6, 0x3c6586};
  AddressStream s(0x9E3779u, 0x2545F4u, excl);
  std::vector<bool> seen(AddressStream::kSpace, false);
  std::uint64_t n = 0;
  try {
    for (;;) {
      const auto v = s.next().value();
      ASSERT_FALSE(seen[v]) << v;
      ASSERT_FALSE(excl.contains(v));
      seen[v] = true;
      ++n;
    }
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::address_exhausted);
  }
  EXPECT_EQ(n, AddressStream::kSpace - 2 - excl.size());
  EXPECT_EQ(s.drawn(), AddressStream::kSpace);
}

TEST(Phantom, BaitAnsweredWithinTwoPeriods) {
  auto r = harness::simulate(scenario("head_on_phantom"));
  auto phases = records(r.log, "phase");
  ASSERT_GE(phases.size(), 3u);
  EXPECT_EQ(phases[1].tag(), "baiting");
  EXPECT_EQ(phases[2].tag(), "tracking");
  EXPECT_LE(phases[2].time_ns - phases[1].time_ns, 2 * kSec);
  EXPECT_TRUE(records(r.log, "attack", "failure").empty());
}

TEST(Phantom, StandbyVictimTimesOutBaiting) {
  auto s = scenario("head_on_phantom");
  s.aircraft[0].state.transponder_mode = sim::TransponderMode::standby;
  s.attacker.bait_timeout_s = 10;
  s.duration_s = 20;
  auto r = harness::simulate(s);
  auto f = records(r.log, "attack", "failure");
  ASSERT_EQ(f.size(), 1u);
  EXPECT_EQ(*f[0].attribute("cause"), "bait_timeout");
  EXPECT_EQ(f[0].time_ns, 13 * kSec);
}

TEST(Phantom, TaOnlyVictimGivesNoRaEvidence) {
  auto s = scenario("head_on_phantom");
  s.aircraft[0].state.transponder_mode = sim::TransponderMode::ta_only;
  auto r = harness::simulate(s);
  auto f = records(r.log, "attack", "failure");
  ASSERT_EQ(f.size(), 1u);
  EXPECT_EQ(*f[0].attribute("cause"), "no_ra_evidence");
  for (const auto& p : records(r.log, "phase")) EXPECT_NE(p.tag(), "done");
  for (const auto& a : r.metrics.advisories) EXPECT_NE(a.tag(), "ra");
}

TEST(Phantom, UnsetVictimEngagesFirstInterrogator) {
  auto s = scenario("benign_pair");
  s.attacker.kind = harness::AttackKind::phantom;
  s.attacker.position = {0, 1, 0};
  s.attacker.plan = {10, 0, 33000, modes::rac::kDoNotPassAbove};
  s.duration_s = 20;
  auto r = harness::simulate(s);
  auto phases = records(r.log, "phase", "tracking");
  ASSERT_EQ(phases.size(), 1u);
  // the interrogator nearer the attacker hears the phantom first
  std::string nearest;
  double best = 1e9;
  for (const auto& a : s.aircraft) {
    const double d = sim::slant_range_nmi(a.state.position, s.attacker.position);
    if (d < best) best = d, nearest = a.state.icao.hex();
  }
  EXPECT_EQ(phases[0].destination, nearest);
}

TEST(Phantom, AddressAboveVictimIsWarned) {
  auto s = scenario("head_on_phantom");
  s.attacker.phantom_icao = modes::IcaoAddress(0x4840d7);
  s.duration_s = 5;
  auto r = harness::simulate(s);
  auto w = records(r.log, "attack", "warning");
  ASSERT_EQ(w.size(), 1u);
  EXPECT_EQ(*w[0].attribute("phantom_above_victim"), "4840d7");
}

TEST(Phantom, NoTargetsWithEmptySky) {
  sim::World w;
  PhantomConfig cfg;
  cfg.position = {0, 0, 0};
  auto& p = w.add(std::make_unique<PhantomAttacker>(cfg));
  w.run_until(10 * kSec);
  EXPECT_TRUE(p.failed());
  EXPECT_EQ(p.recon().size(), 0u);
  auto f = records(w.log(), "attack", "failure");
  ASSERT_EQ(f.size(), 1u);
  EXPECT_EQ(*f[0].attribute("cause"), "no_targets");
}

TEST(Phantom, ReconFindsEveryListeningAircraft) {
  auto s = scenario("head_on_phantom");
  s.duration_s = 4;
  auto sim = harness::build_simulation(s);
  sim.world->run_until(s.duration_ns());
  ASSERT_NE(sim.phantom, nullptr);
  EXPECT_EQ(sim.phantom->recon().size(), 2u);
  for (const auto& e : sim.phantom->recon().entries()) {
    ASSERT_TRUE(e.altitude_ft.has_value());
    const double truth = sim::slant_range_nmi(s.attacker.position, sim.find(e.icao)->aircraft_state(e.observed_ns)->position);
    EXPECT_NEAR(e.range_nmi, truth, 0.01);
  }
}

TEST(Phantom, DelayModeNeverReportsInsideTrueDistance) {
  auto s = scenario("phantom_closing");
  s.attacker.plan.r0_nmi = 2.0;
  s.attacker.plan.closure_kt = 480;
  s.duration_s = 40;
  auto r = harness::simulate(s);
  const double q = oracle::symbol_quantum_nmi();
  const double true_nmi = sim::slant_range_nmi(s.attacker.position, s.aircraft[0].state.position);
  std::size_t infeasible = records(r.log, "attack", "infeasible").size();
  EXPECT_GT(infeasible, 0u);
  for (const auto& x : r.metrics.range_samples) EXPECT_GE(x.range_nmi, true_nmi - q);
}

TEST(Phantom, SkippedInterrogationFallsBackToDelayMode) {
  const modes::IcaoAddress victim(0x7c1a2b), phantom(0x7c1a2a);
  std::vector<TimeNs> schedule;
  for (int k = 0; k < 20; ++k)
    if (k != 10) schedule.push_back(4 * kSec + k * kSec);
  sim::World w;
  auto& v = w.add(std::make_unique<ScriptedVictim>(victim, phantom, schedule));
  PhantomConfig cfg;
  cfg.position = {1, 0, 0};
  cfg.victim = victim;
  cfg.phantom_icao = phantom;
  cfg.plan = {5.0, 0.0, 21000, modes::rac::kDoNotPassAbove};
  auto& a = w.add(std::make_unique<PhantomAttacker>(cfg));
  w.run_until(25 * kSec);

  EXPECT_EQ(a.state().phase, Phase::tracking);
  EXPECT_EQ(records(w.log(), "attack", "prediction_missed").size(), 1u);
  const TimeNs rtt = 128'000 + std::llround(2 * oracle::light_ns(5.0));
  // every real interrogation still sees the plan range
  for (TimeNs tx : v.sent) {
    auto it = std::find_if(v.replies.begin(), v.replies.end(), [&](TimeNs rx) { return std::llabs(rx - tx - rtt) <= 2; });
    EXPECT_NE(it, v.replies.end()) << "no timely reply for " << tx;
  }
  // early replies for the skipped slot and for the slot after the last interrogation
  EXPECT_EQ(v.replies.size(), v.sent.size() + 2);
}

TEST(AllCallFlood, EmptySkyGivesInterrogationsOnly) {
  sim::World w;
  FloodConfig cfg;
  cfg.rate_hz = 10;
  cfg.duration_ns = 10 * kSec;
  w.add(std::make_unique<AllCallFlood>(cfg));
  w.run_until(12 * kSec);
  auto m = harness::compute_metrics(w.log());
  EXPECT_EQ(m.transmissions["interrogation"], 100u);
  EXPECT_EQ(m.transmissions["reply"], 0u);
}

TEST(AllCallFlood, DisabledMatchesBaseline) {
  auto s = scenario("all_call_flood");
  auto off = s;
  off.attacker.flood.rate_hz = 0;
  auto none = s;
  none.attacker.kind = harness::AttackKind::none;
  auto a = harness::simulate(off).metrics, b = harness::simulate(none).metrics;
  EXPECT_EQ(a.transmissions["reply"], b.transmissions["reply"]);
  EXPECT_EQ(a.transmissions["squitter"], b.transmissions["squitter"]);
  EXPECT_EQ(harness::simulate(s).metrics.replies_received["attacker"], 1000u);
}

TEST(SquitterFlood, TrackLifetimeShrinksWithRate) {
  TimeNs prev = std::numeric_limits<TimeNs>::max();
  for (double rate : {0.0, 1.0, 10.0, 100.0}) {
    auto s = scenario("squitter_flood");
    s.attacker.flood.rate_hz = rate;
    auto r = harness::simulate(s);
    TimeNs lifetime = s.duration_ns();
    for (const auto& e : r.metrics.track_events)
      if (e.source == "a1b2c3" && e.destination == "4ca7b1" && (e.tag() == "drop" || e.tag() == "evict")) {
        lifetime = e.time_ns;
        break;
      }
    EXPECT_LE(lifetime, prev) << rate;
    if (rate == 0.0) EXPECT_EQ(lifetime, s.duration_ns());
    if (rate >= 10.0) EXPECT_LT(lifetime, s.duration_ns());
    prev = lifetime;
  }
}

TEST(SquitterFlood, EmitsOneFreshAddressPerTick) {
  sim::World w;
  FloodConfig cfg;
  cfg.rate_hz = 31;
  cfg.duration_ns = kSec;
  auto& f = w.add(std::make_unique<SquitterFlood>(cfg, AddressStream()));
  w.run_until(2 * kSec);
  EXPECT_EQ(f.spoofed().size(), 31u);
  EXPECT_EQ(records(w.log(), "transmit").size(), 31u);
  EXPECT_DOUBLE_EQ(schedule_instant(0, 31, 31), 1e9);
  EXPECT_THROW(schedule_instant(0, 0, 1), Error);
}
