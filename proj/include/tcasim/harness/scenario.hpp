#pragma once

#include <cmath>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tcasim/attack/plan.hpp"
#include "tcasim/error.hpp"
#include "tcasim/sim/kinematics.hpp"

namespace tcasim::harness {

using nlohmann::json;

inline constexpr int kSchemaVersion = 1;

struct AircraftSpec {
  sim::AircraftState state;
  TimeNs squitter_offset_ns = 0;
};

enum class AttackKind { none, phantom, squitter_flood, all_call_flood };

struct JamSpec {
  modes::IcaoAddress target;
  double start_s = 0.0;
  double end_s = 0.0;
};

struct FloodSpec {
  double rate_hz = 10.0;
  double start_s = 0.0;
  double duration_s = 10.0;
  bool respond = true;
  double altitude_ft = 0.0;
  std::uint32_t stream_a = 0x9E3779u | 1u;
  std::uint32_t stream_b = 0x2545F4u;
};

struct AttackerSpec {
  AttackKind kind = AttackKind::none;
  sim::Position position;
  sim::Velocity velocity;
  std::optional<modes::IcaoAddress> victim;
  std::optional<modes::IcaoAddress> phantom_icao;
  attack::SpoofPlan plan;
  bool prediction = true;
  int recon_rounds = 3;
  double bait_timeout_s = 30.0;
  double evidence_timeout_s = 60.0;
  std::vector<JamSpec> jam;
  FloodSpec flood;
};

enum class Predicate { none, nmac, track_lost, track_kept, no_advisories, replies_delivered };

struct SuccessSpec {
  Predicate predicate = Predicate::none;
  std::vector<modes::IcaoAddress> between;  // nmac pair; empty = any pair
  std::optional<modes::IcaoAddress> observer;
  std::optional<modes::IcaoAddress> target;
  std::uint64_t count = 0;
  std::string to = "attacker";
};

struct ChannelSpec {
  bool awgn = false;
  double snr_db = 20.0;
  int samples_per_chip = 2;
};

struct Scenario {
  int schema_version = kSchemaVersion;
  std::string name;
  double duration_s = 0.0;
  double surveillance_period_s = 1.0;
  std::optional<std::uint64_t> seed;
  ChannelSpec channel;
  std::vector<AircraftSpec> aircraft;
  AttackerSpec attacker;
  SuccessSpec success;

  TimeNs duration_ns() const { return units::from_seconds(duration_s); }
  TimeNs surveillance_period_ns() const { return units::from_seconds(surveillance_period_s); }
  long expected_rounds() const { return std::lround(duration_s / surveillance_period_s); }
};

namespace detail {

/// Field access with path-qualified load errors and unknown-key rejection.
class Node {
 public:
  Node(const json& j, std::string path) : j_(j), path_(std::move(path)) {}

  const json& raw() const { return j_; }
  const std::string& path() const { return path_; }

  [[noreturn]] void fail(const std::string& field, const std::string& why) const {
    throw Error(ErrorCode::load, "field '" + qualify(field) + "': " + why);
  }

  std::string qualify(const std::string& field) const { return path_.empty() ? field : path_ + "." + field; }

  void require_object() const {
    if (!j_.is_object()) throw Error(ErrorCode::load, "field '" + (path_.empty() ? std::string("<root>") : path_) + "': expected an object");
  }

  void allow(std::initializer_list<const char*> keys) const {
    require_object();
    std::set<std::string> ok(keys.begin(), keys.end());
    for (const auto& [k, _] : j_.items())
      if (!ok.contains(k)) fail(k, "unknown field");
  }

  bool has(const std::string& k) const { return j_.contains(k); }

  Node child(const std::string& k) const { return Node(j_.at(k), qualify(k)); }

  double number(const std::string& k, std::optional<double> fallback = std::nullopt) const {
    if (!has(k)) {
      if (fallback) return *fallback;
      fail(k, "required");
    }
    if (!j_.at(k).is_number()) fail(k, "expected a number");
    double v = j_.at(k).get<double>();
    if (!std::isfinite(v)) fail(k, "must be finite");
    return v;
  }

  bool boolean(const std::string& k, bool fallback) const {
    if (!has(k)) return fallback;
    if (!j_.at(k).is_boolean()) fail(k, "expected true or false");
    return j_.at(k).get<bool>();
  }

  std::string string(const std::string& k, std::optional<std::string> fallback = std::nullopt) const {
    if (!has(k)) {
      if (fallback) return *fallback;
      fail(k, "required");
    }
    if (!j_.at(k).is_string()) fail(k, "expected a string");
    return j_.at(k).get<std::string>();
  }

  modes::IcaoAddress icao(const std::string& k) const {
    try {
      return modes::IcaoAddress::parse(string(k));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::load) throw;
      fail(k, e.what());
    }
  }

  std::optional<modes::IcaoAddress> optional_icao(const std::string& k) const {
    if (!has(k)) return std::nullopt;
    return icao(k);
  }

  std::pair<double, double> pair(const std::string& k, std::pair<double, double> fallback = {0, 0}) const {
    if (!has(k)) return fallback;
    const json& a = j_.at(k);
    if (!a.is_array() || a.size() != 2 || !a[0].is_number() || !a[1].is_number()) fail(k, "expected [x, y]");
    return {a[0].get<double>(), a[1].get<double>()};
  }

 private:
  const json& j_;
  std::string path_;
};

inline sim::TransponderMode parse_mode(const Node& n, const std::string& k) {
  const std::string s = n.string(k, "ta_ra");
  if (s == "standby") return sim::TransponderMode::standby;
  if (s == "ta_only") return sim::TransponderMode::ta_only;
  if (s == "ta_ra") return sim::TransponderMode::ta_ra;
  n.fail(k, "expected standby, ta_only or ta_ra");
}

inline std::uint8_t parse_rac(const Node& n, const std::string& k) {
  const std::string s = n.string(k, "do_not_pass_above");
  if (s == "do_not_pass_above") return modes::rac::kDoNotPassAbove;
  if (s == "do_not_pass_below") return modes::rac::kDoNotPassBelow;
  n.fail(k, "expected do_not_pass_above or do_not_pass_below");
}

inline AircraftSpec parse_aircraft(const Node& n) {
  n.allow({"icao", "position_nmi", "altitude_ft", "velocity_kt", "vertical_rate_fpm", "transponder_mode", "squitter_offset_ms"});
  AircraftSpec a;
  a.state.icao = n.icao("icao");
  auto [x, y] = n.pair("position_nmi");
  a.state.position = {x, y, n.number("altitude_ft")};
  if (a.state.position.altitude_ft < 0) n.fail("altitude_ft", "must be >= 0");
  auto [vx, vy] = n.pair("velocity_kt");
  a.state.velocity = {vx, vy, n.number("vertical_rate_fpm", 0.0)};
  a.state.transponder_mode = parse_mode(n, "transponder_mode");
  const double off = n.number("squitter_offset_ms", 0.0);
  if (off < 0 || off >= 1000) n.fail("squitter_offset_ms", "must lie in [0, 1000)");
  a.squitter_offset_ns = units::from_seconds(off / 1000.0);
  return a;
}

inline AttackerSpec parse_attacker(const Node& n) {
  n.allow({"kind", "position_nmi", "altitude_ft", "velocity_kt", "vertical_rate_fpm", "victim", "phantom_icao", "plan",
           "prediction", "recon_rounds", "bait_timeout_s", "evidence_timeout_s", "jam", "flood"});
  AttackerSpec a;
  const std::string kind = n.string("kind", "none");
  if (kind == "none") a.kind = AttackKind::none;
  else if (kind == "phantom") a.kind = AttackKind::phantom;
  else if (kind == "squitter_flood") a.kind = AttackKind::squitter_flood;
  else if (kind == "all_call_flood") a.kind = AttackKind::all_call_flood;
  else n.fail("kind", "expected none, phantom, squitter_flood or all_call_flood");
  auto [x, y] = n.pair("position_nmi");
  a.position = {x, y, n.number("altitude_ft", 0.0)};
  auto [vx, vy] = n.pair("velocity_kt");
  a.velocity = {vx, vy, n.number("vertical_rate_fpm", 0.0)};
  a.victim = n.optional_icao("victim");
  a.phantom_icao = n.optional_icao("phantom_icao");
  if (n.has("plan")) {
    Node p = n.child("plan");
    p.allow({"r0_nmi", "closure_kt", "altitude_ft", "rac"});
    a.plan.r0_nmi = p.number("r0_nmi");
    a.plan.closure_kt = p.number("closure_kt");
    a.plan.altitude_ft = p.number("altitude_ft");
    a.plan.rac = parse_rac(p, "rac");
    try {
      a.plan.validate();
    } catch (const Error& e) {
      p.fail("r0_nmi", e.what());
    }
  } else if (a.kind == AttackKind::phantom) {
    n.fail("plan", "required for a phantom attacker");
  }
  a.prediction = n.boolean("prediction", true);
  a.recon_rounds = static_cast<int>(n.number("recon_rounds", 3));
  if (a.recon_rounds < 1) n.fail("recon_rounds", "must be >= 1");
  a.bait_timeout_s = n.number("bait_timeout_s", 30.0);
  a.evidence_timeout_s = n.number("evidence_timeout_s", 60.0);
  if (n.has("jam")) {
    const json& arr = n.raw().at("jam");
    if (!arr.is_array()) n.fail("jam", "expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      Node j(arr[i], n.qualify("jam") + "[" + std::to_string(i) + "]");
      j.allow({"target", "start_s", "end_s"});
      JamSpec js{j.icao("target"), j.number("start_s"), j.number("end_s")};
      if (!(js.end_s > js.start_s)) j.fail("end_s", "must be after start_s");
      a.jam.push_back(js);
    }
  }
  if (n.has("flood")) {
    Node f = n.child("flood");
    f.allow({"rate_hz", "start_s", "duration_s", "respond", "altitude_ft", "stream_a", "stream_b"});
    a.flood.rate_hz = f.number("rate_hz", 10.0);
    if (a.flood.rate_hz < 0) f.fail("rate_hz", "must be >= 0");
    a.flood.start_s = f.number("start_s", 0.0);
    a.flood.duration_s = f.number("duration_s", 10.0);
    a.flood.respond = f.boolean("respond", true);
    a.flood.altitude_ft = f.number("altitude_ft", 0.0);
    a.flood.stream_a = static_cast<std::uint32_t>(f.number("stream_a", a.flood.stream_a));
    a.flood.stream_b = static_cast<std::uint32_t>(f.number("stream_b", a.flood.stream_b));
  }
  return a;
}

inline SuccessSpec parse_success(const Node& n) {
  n.allow({"predicate", "between", "observer", "target", "count", "to"});
  SuccessSpec s;
  const std::string p = n.string("predicate", "none");
  if (p == "none") s.predicate = Predicate::none;
  else if (p == "nmac") s.predicate = Predicate::nmac;
  else if (p == "track_lost") s.predicate = Predicate::track_lost;
  else if (p == "track_kept") s.predicate = Predicate::track_kept;
  else if (p == "no_advisories") s.predicate = Predicate::no_advisories;
  else if (p == "replies_delivered") s.predicate = Predicate::replies_delivered;
  else n.fail("predicate", "unknown predicate '" + p + "'");
  if (n.has("between")) {
    const json& arr = n.raw().at("between");
    if (!arr.is_array() || arr.size() != 2) n.fail("between", "expected two addresses");
    for (const auto& v : arr) {
      if (!v.is_string()) n.fail("between", "expected two addresses");
      s.between.push_back(modes::IcaoAddress::parse(v.get<std::string>()));
    }
  }
  s.observer = n.optional_icao("observer");
  s.target = n.optional_icao("target");
  s.count = static_cast<std::uint64_t>(n.number("count", 0));
  s.to = n.string("to", "attacker");
  if ((s.predicate == Predicate::track_lost || s.predicate == Predicate::track_kept) && (!s.observer || !s.target))
    n.fail("predicate", "track predicates need observer and target");
  return s;
}

}  // namespace detail

inline Scenario load_scenario(const json& doc) {
  detail::Node root(doc, "");
  root.allow({"schema_version", "name", "duration_s", "surveillance_period_s", "seed", "channel", "aircraft", "attacker", "success"});
  Scenario s;
  s.schema_version = static_cast<int>(root.number("schema_version", kSchemaVersion));
  if (s.schema_version != kSchemaVersion) root.fail("schema_version", "unsupported version " + std::to_string(s.schema_version));
  s.name = root.string("name", "unnamed");
  if (!root.has("aircraft") || !doc.at("aircraft").is_array() || doc.at("aircraft").empty())
    root.fail("aircraft", "at least one aircraft is required");
  s.duration_s = root.number("duration_s");
  if (!(s.duration_s > 0)) root.fail("duration_s", "must be > 0");
  s.surveillance_period_s = root.number("surveillance_period_s", 1.0);
  if (!(s.surveillance_period_s > 0)) root.fail("surveillance_period_s", "must be > 0");
  if (root.has("seed")) {
    if (!doc.at("seed").is_number_unsigned()) root.fail("seed", "expected a nonnegative integer");
    s.seed = doc.at("seed").get<std::uint64_t>();
  }
  if (root.has("channel")) {
    detail::Node c = root.child("channel");
    c.allow({"model", "snr_db", "samples_per_chip"});
    const std::string model = c.string("model", "noiseless");
    if (model == "awgn") s.channel.awgn = true;
    else if (model != "noiseless") c.fail("model", "expected noiseless or awgn");
    s.channel.snr_db = c.number("snr_db", 20.0);
    s.channel.samples_per_chip = static_cast<int>(c.number("samples_per_chip", 2));
    if (s.channel.samples_per_chip < 1) c.fail("samples_per_chip", "must be >= 1");
  }
  if (s.channel.awgn && !s.seed) root.fail("seed", "required when the channel is noisy");

  const json& arr = doc.at("aircraft");
  std::set<modes::IcaoAddress> seen;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    auto a = detail::parse_aircraft(detail::Node(arr[i], "aircraft[" + std::to_string(i) + "]"));
    if (!seen.insert(a.state.icao).second)
      throw Error(ErrorCode::load, "field 'aircraft[" + std::to_string(i) + "].icao': duplicate address " + a.state.icao.hex());
    s.aircraft.push_back(a);
  }
  if (root.has("attacker")) s.attacker = detail::parse_attacker(root.child("attacker"));
  if (root.has("success")) s.success = detail::parse_success(root.child("success"));
  return s;
}

inline Scenario load_scenario_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::load, std::string("malformed scenario document: ") + e.what());
  }
  return load_scenario(doc);
}

inline Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open scenario file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return load_scenario_text(ss.str());
}

}  // namespace tcasim::harness
