#pragma once

#include <array>
#include <cstdint>
#include <span>

#include "tcasim/modes/frame.hpp"

namespace tcasim::modes {

/// 25-bit Mode S generator; the leading x^24 term is implicit in the
/// 24-bit register arithmetic below (feedback taps 0xFFF409).
inline constexpr std::uint32_t kCrcGenerator = 0x1FFF409;

namespace detail {

inline constexpr std::array<std::uint32_t, 256> make_crc_table() {
  std::array<std::uint32_t, 256> table{};
  constexpr std::uint32_t taps = kCrcGenerator & 0xFFFFFF;
  for (std::uint32_t n = 0; n < 256; ++n) {
    std::uint32_t crc = n << 16;
    for (int k = 0; k < 8; ++k) crc = (crc & 0x800000) ? ((crc << 1) ^ taps) & 0xFFFFFF : (crc << 1) & 0xFFFFFF;
    table[n] = crc;
  }
  return table;
}

inline constexpr auto kCrcTable = make_crc_table();

}  // namespace detail

/// Remainder of body(x) * x^24 modulo the generator. Body must be the frame
/// minus its 24-bit tail, i.e. 32 or 88 bits.
inline std::uint32_t crc24(std::span<const std::uint8_t> body_bits) {
  if (body_bits.size() != kShortFrameBits - kParityBits && body_bits.size() != kLongFrameBits - kParityBits)
    throw Error(ErrorCode::invalid_length, "CRC body must be 32 or 88 bits, got " + std::to_string(body_bits.size()));
  std::uint32_t crc = 0;
  for (std::size_t i = 0; i < body_bits.size(); i += 8) {
    auto byte = static_cast<std::uint32_t>(read_bits(body_bits, i, 8));
    crc = (detail::kCrcTable[((crc >> 16) ^ byte) & 0xFF] ^ (crc << 8)) & 0xFFFFFF;
  }
  return crc;
}

struct ParityCheck {
  bool passed = false;
  /// crc24(body) XOR ap_field; equals the sealing address for an intact frame.
  IcaoAddress recovered_address;
};

/// Overlays `address` on the CRC to form the AP tail.
inline ModeSFrame seal_frame(ModeSFrame frame, IcaoAddress address) {
  frame.set_ap_field(crc24(frame.body()) ^ address.value());
  return frame;
}

inline ParityCheck verify_frame(const ModeSFrame& frame, IcaoAddress expected) {
  IcaoAddress recovered((crc24(frame.body()) ^ frame.ap_field()) & 0xFFFFFF);
  return {recovered == expected, recovered};
}

}  // namespace tcasim::modes
