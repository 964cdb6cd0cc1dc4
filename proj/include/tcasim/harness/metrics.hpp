#pragma once

#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "tcasim/harness/scenario.hpp"
#include "tcasim/sim/event.hpp"

namespace tcasim::harness {

struct LinkCounts {
  std::uint64_t sent = 0;
  std::uint64_t received_valid = 0;

  std::optional<double> packet_loss() const {
    if (sent == 0) return std::nullopt;
    return static_cast<double>(sent - received_valid) / static_cast<double>(sent);
  }
};

struct RangeSample {
  TimeNs time_ns = 0;
  std::string observer;
  std::string target;
  double range_nmi = 0.0;
  double truth_nmi = 0.0;
  double error_nmi() const { return range_nmi - truth_nmi; }
};

/// Everything here is recomputable from the event log alone.
struct MetricsReport {
  LinkCounts uplink;
  LinkCounts downlink;
  std::map<std::string, std::uint64_t> transmissions;  // by message class
  std::uint64_t erasures = 0;
  std::map<std::pair<std::string, std::string>, std::uint64_t> rounds;  // (interrogator, target) -> addressed interrogations
  std::map<std::string, std::uint64_t> replies_received;               // receiver -> valid reply deliveries addressed to it
  std::vector<sim::LogRecord> track_events;
  std::vector<sim::LogRecord> advisories;
  std::vector<sim::LogRecord> phases;
  std::vector<sim::LogRecord> attack_events;
  std::vector<sim::LogRecord> pilot_events;
  std::vector<sim::LogRecord> nmacs;
  std::vector<RangeSample> range_samples;
  bool aborted = false;

  bool nmac_occurred() const { return !nmacs.empty(); }

  std::uint64_t rounds_for(const std::string& interrogator, const std::string& target) const {
    auto it = rounds.find({interrogator, target});
    return it == rounds.end() ? 0 : it->second;
  }
};

inline bool is_uplink_class(const std::string& cls) { return cls == "interrogation" || cls == "coordination"; }

inline MetricsReport compute_metrics(const sim::EventLog& log) {
  MetricsReport m;
  for (const auto& r : log) {
    if (r.kind == "transmit") {
      ++m.transmissions[r.outcome];
      if (r.outcome == "interrogation" && r.destination != "*") ++m.rounds[{r.source, r.destination}];
    } else if (r.kind == "deliver") {
      const auto colon = r.outcome.find(':');
      const std::string status = r.outcome.substr(0, colon);
      const std::string cls = colon == std::string::npos ? "" : r.outcome.substr(colon + 1, r.outcome.find(';') - colon - 1);
      LinkCounts& link = is_uplink_class(cls) ? m.uplink : m.downlink;
      ++link.sent;
      if (status == "ok") ++link.received_valid;
      if (status == "ok" && cls == "reply" && r.attribute("to") == r.destination) ++m.replies_received[r.destination];
    } else if (r.kind == "erase") {
      ++m.erasures;
    } else if (r.kind == "track") {
      if (r.tag() == "update") {
        auto range = r.attribute("range_nmi");
        auto truth = r.attribute("truth_nmi");
        if (range && truth) m.range_samples.push_back({r.time_ns, r.source, r.destination, std::stod(*range), std::stod(*truth)});
      } else {
        m.track_events.push_back(r);
      }
    } else if (r.kind == "advisory" || r.kind == "coordination") {
      m.advisories.push_back(r);
    } else if (r.kind == "phase") {
      m.phases.push_back(r);
    } else if (r.kind == "attack") {
      m.attack_events.push_back(r);
    } else if (r.kind == "pilot") {
      m.pilot_events.push_back(r);
    } else if (r.kind == "nmac") {
      m.nmacs.push_back(r);
    } else if (r.kind == "abort") {
      m.aborted = true;
    }
  }
  return m;
}

inline std::string csv_number(double v) { return sim::fmt(v, 9); }

inline void write_metrics_csv(std::ostream& out, const MetricsReport& m) {
  out << "section,time_ns,entity,target,key,value\n";
  auto row = [&](const std::string& section, TimeNs t, const std::string& entity, const std::string& target, const std::string& key,
                 const std::string& value) { out << section << ',' << t << ',' << entity << ',' << target << ',' << key << ',' << value << '\n'; };
  for (const auto& [cls, n] : m.transmissions) row("summary", 0, "*", "*", "transmit_" + cls, std::to_string(n));
  row("summary", 0, "*", "*", "erasures", std::to_string(m.erasures));
  row("summary", 0, "*", "*", "nmac_occurred", m.nmac_occurred() ? "1" : "0");
  row("summary", 0, "*", "*", "aborted", m.aborted ? "1" : "0");
  for (const auto& [name, link] : {std::pair<std::string, const LinkCounts&>{"uplink", m.uplink}, {"downlink", m.downlink}}) {
    row("link", 0, name, "*", "sent", std::to_string(link.sent));
    row("link", 0, name, "*", "received_valid", std::to_string(link.received_valid));
    auto loss = link.packet_loss();
    row("link", 0, name, "*", "packet_loss", loss ? csv_number(*loss) : "undefined");
  }
  for (const auto& [k, n] : m.rounds) row("rounds", 0, k.first, k.second, "interrogations", std::to_string(n));
  for (const auto& [k, n] : m.replies_received) row("replies", 0, k, "*", "replies_received", std::to_string(n));
  for (const auto& r : m.track_events) row("track", r.time_ns, r.source, r.destination, r.tag(), r.outcome);
  for (const auto& r : m.advisories) row("advisory", r.time_ns, r.source, r.destination, r.tag(), r.outcome);
  for (const auto& r : m.pilot_events) row("pilot", r.time_ns, r.source, r.destination, r.tag(), r.outcome);
  for (const auto& s : m.range_samples) {
    row("range", s.time_ns, s.observer, s.target, "range_nmi", csv_number(s.range_nmi));
    row("range", s.time_ns, s.observer, s.target, "truth_nmi", csv_number(s.truth_nmi));
    row("range", s.time_ns, s.observer, s.target, "error_nmi", csv_number(s.error_nmi()));
  }
  for (const auto& r : m.phases) row("phase", r.time_ns, r.source, r.destination, r.tag(), r.outcome);
  for (const auto& r : m.attack_events) row("attack", r.time_ns, r.source, r.destination, r.tag(), r.outcome);
  for (const auto& r : m.nmacs) row("nmac", r.time_ns, r.source, r.destination, "nmac", r.outcome);
}

struct PredicateResult {
  bool holds = false;
  std::string detail;
};

inline PredicateResult evaluate_success(const SuccessSpec& s, const MetricsReport& m) {
  switch (s.predicate) {
    case Predicate::none: return {true, "no predicate"};
    case Predicate::nmac:
      for (const auto& r : m.nmacs) {
        if (s.between.empty()) return {true, "nmac at " + std::to_string(r.time_ns) + " ns"};
        const std::string a = s.between[0].hex(), b = s.between[1].hex();
        if ((r.source == a && r.destination == b) || (r.source == b && r.destination == a))
          return {true, "nmac " + a + "/" + b + " at " + std::to_string(r.time_ns) + " ns"};
      }
      return {false, "no nmac"};
    case Predicate::track_lost:
    case Predicate::track_kept: {
      const std::string obs = s.observer->hex(), tgt = s.target->hex();
      bool acquired = false;
      std::optional<TimeNs> lost;
      for (const auto& r : m.track_events) {
        if (r.source != obs || r.destination != tgt) continue;
        if (r.tag() == "acquire") acquired = true;
        if ((r.tag() == "drop" || r.tag() == "evict") && !lost) lost = r.time_ns;
      }
      if (s.predicate == Predicate::track_lost)
        return lost ? PredicateResult{true, "track lost at " + std::to_string(*lost) + " ns"} : PredicateResult{false, "track never lost"};
      if (!acquired) return {false, "track never acquired"};
      return lost ? PredicateResult{false, "track lost at " + std::to_string(*lost) + " ns"} : PredicateResult{true, "track kept"};
    }
    case Predicate::no_advisories: {
      std::size_t n = 0;
      for (const auto& r : m.advisories)
        if (r.tag() == "ta" || r.tag() == "ra") ++n;
      return {n == 0, std::to_string(n) + " advisories"};
    }
    case Predicate::replies_delivered: {
      auto it = m.replies_received.find(s.to);
      const std::uint64_t n = it == m.replies_received.end() ? 0 : it->second;
      return {n == s.count, std::to_string(n) + " replies delivered to " + s.to};
    }
  }
  return {false, "unknown predicate"};
}

}  // namespace tcasim::harness
