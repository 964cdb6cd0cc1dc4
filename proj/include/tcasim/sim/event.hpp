#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "tcasim/modes/frame.hpp"
#include "tcasim/units.hpp"

namespace tcasim::sim {

using EntityId = std::uint32_t;

enum class EventKind { transmit, deliver, timer };

enum class MessageClass { interrogation, reply, squitter, coordination };

constexpr const char* to_string(MessageClass c) {
  switch (c) {
    case MessageClass::interrogation: return "interrogation";
    case MessageClass::reply: return "reply";
    case MessageClass::squitter: return "squitter";
    case MessageClass::coordination: return "coordination";
  }
  return "?";
}

struct Transmission {
  modes::ModeSFrame frame;
  MessageClass message_class = MessageClass::interrogation;
  /// Addressee as six hex digits, or "*" for broadcasts.
  std::string destination = "*";
  /// Identity the jammer keys on; set for downlink transmissions.
  std::optional<modes::IcaoAddress> source_icao;
};

struct SimEvent {
  TimeNs time_ns = 0;
  EventKind kind = EventKind::timer;
  EntityId source = 0;
  EntityId destination = 0;
  std::uint64_t sequence = 0;
  std::shared_ptr<const Transmission> payload;
  std::uint64_t timer_tag = 0;
  /// Transmit instant for deliver events.
  TimeNs origin_ns = 0;
};

/// Queue order: time, then source entity, then insertion sequence.
struct EventAfter {
  bool operator()(const SimEvent& a, const SimEvent& b) const {
    if (a.time_ns != b.time_ns) return a.time_ns > b.time_ns;
    if (a.source != b.source) return a.source > b.source;
    return a.sequence > b.sequence;
  }
};

struct JamDirective {
  modes::IcaoAddress target;
  TimeNs window_start_ns = 0;
  TimeNs window_end_ns = 0;

  JamDirective(modes::IcaoAddress t, TimeNs start, TimeNs end) : target(t), window_start_ns(start), window_end_ns(end) {
    if (end <= start) throw Error(ErrorCode::parameter, "jam window must end after it starts");
  }

  bool overlaps(TimeNs begin, TimeNs end) const { return begin < window_end_ns && end > window_start_ns; }
};

/// One line of the event log: time_ns,kind,source,destination,frame,outcome.
/// Outcome is free text without commas; structured outcomes use
/// `tag;key=value;...`.
struct LogRecord {
  TimeNs time_ns = 0;
  std::string kind;
  std::string source;
  std::string destination;
  std::string frame;
  std::string outcome;

  std::string to_line() const {
    std::string line = std::to_string(time_ns);
    for (const std::string* f : {&kind, &source, &destination, &frame, &outcome}) {
      line.push_back(',');
      line += *f;
    }
    return line;
  }

  static LogRecord parse(const std::string& line) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : line) {
      if (c == ',') {
        parts.push_back(cur);
        cur.clear();
      } else {
        cur.push_back(c);
      }
    }
    parts.push_back(cur);
    if (parts.size() != 6) throw Error(ErrorCode::parameter, "event log line must have 6 fields: " + line);
    LogRecord r;
    r.time_ns = std::stoll(parts[0]);
    r.kind = parts[1];
    r.source = parts[2];
    r.destination = parts[3];
    r.frame = parts[4];
    r.outcome = parts[5];
    return r;
  }

  /// Value of `key=` inside a structured outcome, if present.
  std::optional<std::string> attribute(const std::string& key) const {
    std::size_t pos = 0;
    while (pos <= outcome.size()) {
      std::size_t end = outcome.find(';', pos);
      if (end == std::string::npos) end = outcome.size();
      std::string item = outcome.substr(pos, end - pos);
      if (item.size() > key.size() && item.compare(0, key.size(), key) == 0 && item[key.size()] == '=')
        return item.substr(key.size() + 1);
      pos = end + 1;
    }
    return std::nullopt;
  }

  /// Leading tag of a structured outcome (text before the first ';' or ':').
  std::string tag() const { return outcome.substr(0, outcome.find_first_of(";:")); }

  bool operator==(const LogRecord&) const = default;
};

using EventLog = std::vector<LogRecord>;

inline constexpr const char* kEventLogHeader = "time_ns,kind,source,destination,frame,outcome";

inline void write_event_log(std::ostream& out, const EventLog& log) {
  out << kEventLogHeader << '\n';
  for (const auto& r : log) out << r.to_line() << '\n';
}

inline EventLog read_event_log(std::istream& in) {
  EventLog log;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (first) {
      first = false;
      if (line == kEventLogHeader) continue;
    }
    if (!line.empty()) log.push_back(LogRecord::parse(line));
  }
  return log;
}

/// Fixed-precision numeric formatting for log attributes.
inline std::string fmt(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace tcasim::sim
