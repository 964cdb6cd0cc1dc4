#pragma once

#include <stdexcept>
#include <string>

namespace tcasim {

enum class ErrorCode {
  invalid_length,
  unsupported_format,
  range,
  parameter,
  truncation,
  undefined,
  insufficient_data,
  infeasible_spoof,
  prediction_unavailable,
  attack_race_lost,
  address_exhausted,
  bait_timeout,
  coordination_conflict,
  load,
  simulation_abort,
  io,
};

constexpr const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_length: return "invalid-length";
    case ErrorCode::unsupported_format: return "unsupported-format";
    case ErrorCode::range: return "range";
    case ErrorCode::parameter: return "parameter";
    case ErrorCode::truncation: return "truncation";
    case ErrorCode::undefined: return "undefined";
    case ErrorCode::insufficient_data: return "insufficient-data";
    case ErrorCode::infeasible_spoof: return "infeasible-spoof";
    case ErrorCode::prediction_unavailable: return "prediction-unavailable";
    case ErrorCode::attack_race_lost: return "attack-race-lost";
    case ErrorCode::address_exhausted: return "address-exhausted";
    case ErrorCode::bait_timeout: return "bait-timeout";
    case ErrorCode::coordination_conflict: return "coordination-conflict";
    case ErrorCode::load: return "load";
    case ErrorCode::simulation_abort: return "simulation-abort";
    case ErrorCode::io: return "io";
  }
  return "unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace tcasim
