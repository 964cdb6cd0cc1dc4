#pragma once

#include <deque>
#include <map>
#include <optional>
#include <string>

#include "tcasim/attack/plan.hpp"
#include "tcasim/sim/world.hpp"

namespace tcasim::attack {

enum class Phase { recon, baiting, tracking, threat_declared, done };

constexpr const char* to_string(Phase p) {
  switch (p) {
    case Phase::recon: return "recon";
    case Phase::baiting: return "baiting";
    case Phase::tracking: return "tracking";
    case Phase::threat_declared: return "threat_declared";
    case Phase::done: return "done";
  }
  return "?";
}

struct PhantomConfig {
  sim::Position position;
  sim::Velocity velocity;
  std::optional<modes::IcaoAddress> victim;
  std::optional<modes::IcaoAddress> phantom_icao;
  SpoofPlan plan;
  bool prediction = true;
  int recon_rounds = 3;
  TimeNs recon_period_ns = units::kNsPerSecond;
  TimeNs bait_timeout_ns = 30 * units::kNsPerSecond;
  TimeNs evidence_timeout_ns = 60 * units::kNsPerSecond;
  TimeNs squitter_period_ns = units::kNsPerSecond;
  TimeNs feed_period_ns = units::kNsPerSecond;
  std::size_t feed_window = 5;
  TimeNs turnaround_ns = 128 * units::kNsPerMicrosecond;
  TimeNs prediction_tolerance_ns = units::kNsPerMicrosecond;
  tcas::TcasConfig threat_model;
};

struct PhantomState {
  Phase phase = Phase::recon;
  std::optional<modes::IcaoAddress> victim;
  modes::IcaoAddress phantom_icao;
  std::optional<TimeNs> learned_period_ns;
  SpoofPlan plan;
};

/// Phantom aircraft attacker: recon, bait, maintain a spoofed track with
/// timed replies, then declare a threat with a forged complement.
class PhantomAttacker : public sim::Entity {
 public:
  explicit PhantomAttacker(PhantomConfig cfg) : cfg_(std::move(cfg)), recon_(cfg_.turnaround_ns) {
    cfg_.plan.validate();
    state_.plan = cfg_.plan;
    state_.victim = cfg_.victim;
  }

  std::string name() const override { return "attacker"; }

  sim::Position position_at(TimeNs t) const override {
    const double dt = units::seconds(t);
    return {cfg_.position.x_nmi + cfg_.velocity.vx_kt * dt / 3600.0, cfg_.position.y_nmi + cfg_.velocity.vy_kt * dt / 3600.0,
            std::max(0.0, cfg_.position.altitude_ft + cfg_.velocity.vertical_rate_fpm * dt / 60.0)};
  }

  std::optional<double> apparent_range_nmi(modes::IcaoAddress target, TimeNs t) const override {
    if (!origin_ || target != state_.phantom_icao) return std::nullopt;
    return cfg_.plan.range_at(units::seconds(t - *origin_));
  }

  const PhantomState& state() const { return state_; }
  const Reconnaissance& recon() const { return recon_; }
  bool failed() const { return failed_; }

  void start(sim::World& w) override {
    enter(w, Phase::recon, "rounds=" + std::to_string(cfg_.recon_rounds));
    for (int k = 0; k < cfg_.recon_rounds; ++k) w.schedule_timer(id(), k * cfg_.recon_period_ns, tag(Timer::recon_round, 0));
    w.schedule_timer(id(), cfg_.recon_rounds * cfg_.recon_period_ns, tag(Timer::recon_end, 0));
    w.schedule_timer(id(), 0, tag(Timer::feed, 0));
  }

  void on_timer(sim::World& w, std::uint64_t t) override {
    switch (static_cast<Timer>(t >> 56)) {
      case Timer::recon_round:
        last_all_call_ns_ = w.now();
        w.transmit(id(), {modes::build_interrogation(modes::UplinkFormat::all_call, modes::IcaoAddress::all_call()),
                          sim::MessageClass::interrogation, "*", std::nullopt},
                   w.now());
        break;
      case Timer::recon_end: finish_recon(w); break;
      case Timer::squitter:
        if (failed_) break;
        w.transmit(id(), {modes::build_reply(modes::DownlinkFormat::extended_squitter, state_.phantom_icao,
                                             static_cast<int>(std::lround(cfg_.plan.altitude_ft)), {{"ca", 5}, {"tc", 11}}),
                          sim::MessageClass::squitter, "*", state_.phantom_icao},
                   w.now());
        w.schedule_timer(id(), w.now() + cfg_.squitter_period_ns, tag(Timer::squitter, 0));
        break;
      case Timer::feed:
        for (const auto& s : w.aircraft_states(w.now())) {
          auto& q = fixes_[s.icao];
          q.push_back({w.now(), s.position});
          if (q.size() > cfg_.feed_window) q.pop_front();
        }
        w.schedule_timer(id(), w.now() + cfg_.feed_period_ns, tag(Timer::feed, 0));
        break;
      case Timer::bait_timeout:
        if (state_.phase == Phase::baiting) fail(w, ErrorCode::bait_timeout, "bait_timeout");
        break;
      case Timer::evidence_timeout:
        if (state_.phase == Phase::threat_declared) fail(w, ErrorCode::attack_race_lost, "no_ra_evidence");
        break;
    }
  }

  void on_receive(sim::World& w, const sim::Delivery& d) override {
    if (d.frame.direction() == modes::Direction::downlink) {
      on_downlink(w, d);
      return;
    }
    if (state_.phase == Phase::recon || failed_) return;
    const auto uf = d.frame.format_code();
    if (uf != 0 && uf != 16) return;
    auto r = modes::parse_frame(d.frame, state_.phantom_icao);
    if (!modes::decoded_ok(r)) return;
    const auto sender = w.entity(d.from).aircraft_state(d.rx_time_ns);
    if (!sender) return;
    if (state_.victim && sender->icao != *state_.victim) return;
    if (uf == 16) {
      on_coordination(w, std::get<modes::DecodedMessage>(r), sender->icao);
      return;
    }
    if (!state_.victim) state_.victim = sender->icao;
    if (victim_name_ == "*") victim_name_ = w.entity(d.from).name();
    on_interrogation(w, d.rx_time_ns);
  }

 private:
  enum class Timer : std::uint8_t { recon_round = 1, recon_end, squitter, feed, bait_timeout, evidence_timeout };
  static std::uint64_t tag(Timer k, std::uint64_t payload) { return (static_cast<std::uint64_t>(k) << 56) | payload; }

  void enter(sim::World& w, Phase p, const std::string& detail = "") {
    state_.phase = p;
    w.record(w.now(), "phase", name(), state_.victim ? state_.victim->hex() : "*", "",
             std::string(to_string(p)) + (detail.empty() ? "" : ";" + detail));
  }

  void fail(sim::World& w, ErrorCode code, const std::string& cause) {
    failed_ = true;
    w.record(w.now(), "attack", name(), state_.victim ? state_.victim->hex() : "*", "",
             "failure;cause=" + cause + ";code=" + to_string(code));
  }

  void on_downlink(sim::World& w, const sim::Delivery& d) {
    if (d.tx.message_class != sim::MessageClass::reply || d.tx.destination != name()) return;
    auto r = modes::parse_frame(d.frame);
    const auto df = d.frame.format_code();
    if (df == 11 && modes::decoded_ok(r)) {
      const auto addr = std::get<modes::DecodedMessage>(r).address;
      if (recon_.on_all_call_reply(addr, last_all_call_ns_, d.rx_time_ns))
        w.transmit(id(), {modes::build_interrogation(modes::UplinkFormat::short_surveillance, addr),
                          sim::MessageClass::interrogation, addr.hex(), std::nullopt},
                   w.now());
    } else if (df == 0) {
      const modes::IcaoAddress addr((modes::crc24(d.frame.body()) ^ d.frame.ap_field()) & 0xFFFFFF);
      auto v = modes::parse_frame(d.frame, addr);
      if (recon_.contains(addr) && modes::decoded_ok(v))
        recon_.on_altitude(addr, *std::get<modes::DecodedMessage>(v).altitude_ft);
    }
  }

  void finish_recon(sim::World& w) {
    w.record(w.now(), "attack", name(), "*", "", "recon_complete;entries=" + std::to_string(recon_.size()));
    if (cfg_.phantom_icao) {
      state_.phantom_icao = *cfg_.phantom_icao;
    } else if (state_.victim) {
      state_.phantom_icao = choose_phantom_icao(*state_.victim);
    } else if (recon_.size() > 0) {
      state_.phantom_icao = choose_phantom_icao(recon_.entries().front().icao);
    } else {
      fail(w, ErrorCode::insufficient_data, "no_targets");
      return;
    }
    if (state_.victim && state_.phantom_icao > *state_.victim)
      w.record(w.now(), "attack", name(), state_.victim->hex(), "", "warning;phantom_above_victim=" + state_.phantom_icao.hex());
    enter(w, Phase::baiting, "phantom=" + state_.phantom_icao.hex());
    w.schedule_timer(id(), w.now(), tag(Timer::squitter, 0));
    w.schedule_timer(id(), w.now() + cfg_.bait_timeout_ns, tag(Timer::bait_timeout, 0));
  }

  std::optional<TrajectoryEstimate> victim_course() const {
    auto it = fixes_.find(*state_.victim);
    if (it == fixes_.end() || it->second.size() < 2) return std::nullopt;
    return estimate_trajectory({it->second.begin(), it->second.end()});
  }

  TimeNs delay_to_victim(const TrajectoryEstimate& est, TimeNs t) const {
    return sim::propagation_delay_ns(position_at(t), est.position_at(t));
  }

  double desired_range(TimeNs victim_tx) const { return cfg_.plan.range_at(units::seconds(victim_tx - *origin_)); }

  void send_reply(sim::World& w, TimeNs at) {
    const int alt = static_cast<int>(std::lround(cfg_.plan.altitude_ft));
    w.transmit(id(), {modes::build_reply(modes::DownlinkFormat::short_surveillance, state_.phantom_icao, alt, {{"sl", 3}}),
                      sim::MessageClass::reply, victim_name_, state_.phantom_icao},
               at);
  }

  void on_interrogation(sim::World& w, TimeNs rx) {
    auto est = victim_course();
    if (!est) {
      w.record(rx, "attack", name(), state_.victim->hex(), "", "no_course");
      return;
    }
    // Victim transmit instant: uplink delay evaluated at the transmit time.
    TimeNs d_up = delay_to_victim(*est, rx);
    d_up = delay_to_victim(*est, rx - d_up);
    const TimeNs tx = rx - d_up;
    if (!origin_) {
      origin_ = tx;
      enter(w, Phase::tracking, "origin_ns=" + std::to_string(tx));
    }

    bool answered = false;
    if (predicted_tx_) {
      if (std::llabs(tx - *predicted_tx_) <= cfg_.prediction_tolerance_ns) {
        answered = true;
      } else {
        w.record(rx, "attack", name(), state_.victim->hex(), "",
                 "prediction_missed;expected_ns=" + std::to_string(*predicted_tx_) + ";actual_ns=" + std::to_string(tx));
        learner_.reset();
      }
      predicted_tx_.reset();
    }

    if (!answered) {
      const double desired = desired_range(tx);
      const double budget = two_way_time_ns(desired) - static_cast<double>(d_up);
      TimeNs reply_at = rx + cfg_.turnaround_ns;
      TimeNs d_down = delay_to_victim(*est, reply_at);
      auto extra = static_cast<TimeNs>(std::llround(budget - static_cast<double>(d_down)));
      if (extra >= 0) {
        d_down = delay_to_victim(*est, reply_at + extra);
        extra = static_cast<TimeNs>(std::llround(budget - static_cast<double>(d_down)));
      }
      if (extra < 0) {
        const double true_nmi = sim::slant_range_nmi(position_at(tx), est->position_at(tx));
        w.record(rx, "attack", name(), state_.victim->hex(), "",
                 "infeasible;desired_nmi=" + sim::fmt(desired, 6) + ";true_nmi=" + sim::fmt(true_nmi, 6) +
                     ";code=" + to_string(ErrorCode::infeasible_spoof));
      } else {
        send_reply(w, reply_at + extra);
      }
    }

    learner_.observe(tx);
    state_.learned_period_ns = learner_.available() ? std::optional<TimeNs>(learner_.period()) : std::nullopt;
    if (cfg_.prediction && learner_.available()) schedule_early_reply(w, *est, tx);
    maybe_declare(w, *est, tx);
  }

  void schedule_early_reply(sim::World& w, const TrajectoryEstimate& est, TimeNs last_tx) {
    const TimeNs p = learner_.predict_next(last_tx);
    const double desired = desired_range(p);
    TimeNs d_down = delay_to_victim(est, p);
    TimeNs at = predictive_reply_time(p, desired, cfg_.turnaround_ns, d_down);
    d_down = delay_to_victim(est, at);
    at = predictive_reply_time(p, desired, cfg_.turnaround_ns, d_down);
    if (at < w.now()) return;
    predicted_tx_ = p;
    send_reply(w, at);
  }

  void maybe_declare(sim::World& w, const TrajectoryEstimate& est, TimeNs tx) {
    if (state_.phase != Phase::tracking && state_.phase != Phase::threat_declared) return;
    if (state_.phase == Phase::tracking) {
      const double t = units::seconds(tx - *origin_);
      const double tau = tcas::compute_tau(cfg_.plan.range_at(t), cfg_.plan.range_rate_at(t));
      const double dz = std::abs(cfg_.plan.altitude_ft - est.position_at(tx).altitude_ft);
      if (tau > cfg_.threat_model.ta_tau_s || dz > cfg_.threat_model.ta_altitude_gate_ft) return;
      enter(w, Phase::threat_declared, "tau_s=" + sim::fmt(tau, 3) + ";rac=" + std::to_string(cfg_.plan.rac));
      w.schedule_timer(id(), w.now() + cfg_.evidence_timeout_ns, tag(Timer::evidence_timeout, 0));
    }
    const modes::FieldMap mu = {
        {"uds", modes::kResolutionMessageUds}, {"rac", cfg_.plan.rac}, {"sender", state_.phantom_icao.value()}};
    w.transmit(id(), {modes::build_interrogation(modes::UplinkFormat::long_surveillance, *state_.victim, mu),
                      sim::MessageClass::coordination, state_.victim->hex(), std::nullopt},
               w.now());
  }

  void on_coordination(sim::World& w, const modes::DecodedMessage& msg, modes::IcaoAddress from) {
    if (msg.field("uds") != modes::kResolutionMessageUds || msg.field("rac") == 0) return;
    if (state_.phase == Phase::threat_declared) {
      enter(w, Phase::done, "evidence_rac=" + std::to_string(msg.field("rac")));
    } else if (state_.phase == Phase::tracking || state_.phase == Phase::baiting) {
      fail(w, ErrorCode::attack_race_lost, "race_lost;from=" + from.hex());
    }
  }

  PhantomConfig cfg_;
  PhantomState state_;
  Reconnaissance recon_;
  PeriodLearner learner_;
  std::map<modes::IcaoAddress, std::deque<PositionFix>> fixes_;
  std::optional<TimeNs> origin_;
  std::optional<TimeNs> predicted_tx_;
  TimeNs last_all_call_ns_ = 0;
  std::string victim_name_ = "*";
  bool failed_ = false;
};

}  // namespace tcasim::attack
