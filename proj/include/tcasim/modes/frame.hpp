#pragma once

#include <compare>
#include <cstdint>
#include <cstdio>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tcasim/error.hpp"

namespace tcasim::modes {

/// One bit per element, value 0 or 1, most-significant bit first.
using Bits = std::vector<std::uint8_t>;

inline constexpr int kShortFrameBits = 56;
inline constexpr int kLongFrameBits = 112;
inline constexpr int kParityBits = 24;
inline constexpr int kHeaderBits = 5;

inline bool valid_frame_length(std::size_t n) { return n == kShortFrameBits || n == kLongFrameBits; }

/// 24-bit aircraft address.
class IcaoAddress {
 public:
  static constexpr std::uint32_t kMask = 0xFFFFFF;

  constexpr IcaoAddress() = default;
  explicit IcaoAddress(std::uint32_t value) : value_(value) {
    if (value > kMask) throw Error(ErrorCode::range, "ICAO address exceeds 24 bits");
  }

  /// The broadcast address used by all-call interrogations: 24 ones.
  static constexpr IcaoAddress all_call() {
    IcaoAddress a;
    a.value_ = kMask;
    return a;
  }

  constexpr std::uint32_t value() const { return value_; }
  constexpr bool is_all_call() const { return value_ == kMask; }

  std::string hex() const {
    char buf[8];
    std::snprintf(buf, sizeof buf, "%06x", value_);
    return buf;
  }

  static IcaoAddress parse(std::string_view text) {
    if (text.size() > 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X')) text.remove_prefix(2);
    if (text.empty() || text.size() > 6) throw Error(ErrorCode::parameter, "malformed ICAO address '" + std::string(text) + "'");
    std::uint32_t v = 0;
    for (char c : text) {
      int d = hex_digit(c);
      if (d < 0) throw Error(ErrorCode::parameter, "malformed ICAO address '" + std::string(text) + "'");
      v = (v << 4) | static_cast<std::uint32_t>(d);
    }
    return IcaoAddress(v);
  }

  static constexpr int hex_digit(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  }

  constexpr auto operator<=>(const IcaoAddress&) const = default;

 private:
  std::uint32_t value_ = 0;
};

enum class Direction { uplink, downlink };

constexpr const char* to_string(Direction d) { return d == Direction::uplink ? "uplink" : "downlink"; }

inline std::uint64_t read_bits(std::span<const std::uint8_t> bits, std::size_t offset, std::size_t width) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < width; ++i) v = (v << 1) | (bits[offset + i] & 1u);
  return v;
}

inline void write_bits(std::span<std::uint8_t> bits, std::size_t offset, std::size_t width, std::uint64_t value) {
  for (std::size_t i = 0; i < width; ++i) bits[offset + i] = static_cast<std::uint8_t>((value >> (width - 1 - i)) & 1u);
}

inline std::string bits_to_hex(std::span<const std::uint8_t> bits) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bits.size() / 4);
  for (std::size_t i = 0; i + 4 <= bits.size(); i += 4) out.push_back(kDigits[read_bits(bits, i, 4)]);
  return out;
}

inline Bits hex_to_bits(std::string_view hex) {
  if (hex.size() != 14 && hex.size() != 28)
    throw Error(ErrorCode::parameter, "frame hex must be 14 or 28 digits, got " + std::to_string(hex.size()));
  Bits bits(hex.size() * 4);
  for (std::size_t i = 0; i < hex.size(); ++i) {
    int d = IcaoAddress::hex_digit(hex[i]);
    if (d < 0) throw Error(ErrorCode::parameter, std::string("malformed hex digit '") + hex[i] + "'");
    write_bits(bits, i * 4, 4, static_cast<std::uint64_t>(d));
  }
  return bits;
}

/// A 56- or 112-bit Mode S message. The first five bits are the format header,
/// the last 24 are the address/parity (or parity/identity) field.
class ModeSFrame {
 public:
  ModeSFrame(Direction direction, Bits bits) : direction_(direction), bits_(std::move(bits)) {
    if (!valid_frame_length(bits_.size()))
      throw Error(ErrorCode::invalid_length, "frame must be 56 or 112 bits, got " + std::to_string(bits_.size()));
    for (auto& b : bits_) b &= 1u;
  }

  static ModeSFrame from_hex(Direction direction, std::string_view hex) { return ModeSFrame(direction, hex_to_bits(hex)); }

  Direction direction() const { return direction_; }
  std::size_t size() const { return bits_.size(); }
  bool is_long() const { return bits_.size() == kLongFrameBits; }
  std::uint8_t format_code() const { return static_cast<std::uint8_t>(read_bits(bits_, 0, kHeaderBits)); }

  std::span<const std::uint8_t> bits() const { return bits_; }
  std::span<std::uint8_t> mutable_bits() { return bits_; }
  std::span<const std::uint8_t> body() const { return std::span(bits_).first(bits_.size() - kParityBits); }

  std::uint32_t ap_field() const {
    return static_cast<std::uint32_t>(read_bits(bits_, bits_.size() - kParityBits, kParityBits));
  }
  void set_ap_field(std::uint32_t ap) { write_bits(bits_, bits_.size() - kParityBits, kParityBits, ap & 0xFFFFFFu); }

  std::uint64_t field(std::size_t offset, std::size_t width) const { return read_bits(bits_, offset, width); }
  void set_field(std::size_t offset, std::size_t width, std::uint64_t v) { write_bits(bits_, offset, width, v); }

  std::string hex() const { return bits_to_hex(bits_); }

  bool operator==(const ModeSFrame&) const = default;

 private:
  Direction direction_;
  Bits bits_;
};

}  // namespace tcasim::modes
