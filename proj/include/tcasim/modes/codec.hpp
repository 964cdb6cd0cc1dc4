#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tcasim/modes/crc.hpp"
#include "tcasim/modes/frame.hpp"

namespace tcasim::modes {

// Only the formats exercised by TCAS surveillance, coordination and the
// attacks are supported. Code values match the ICAO numbering.
enum class UplinkFormat : std::uint8_t {
  short_surveillance = 0,  // UF0, air-air surveillance request
  all_call = 11,           // UF11
  long_surveillance = 16,  // UF16, carries the coordination (MU) field
};

enum class DownlinkFormat : std::uint8_t {
  short_surveillance = 0,    // DF0, altitude reply
  all_call_reply = 11,       // DF11, plain address (also the acquisition squitter)
  long_surveillance = 16,    // DF16, altitude + MV field
  extended_squitter = 17,    // DF17, plain address + ME field
};

using FieldMap = std::map<std::string, std::uint32_t>;

struct FieldSpec {
  std::string_view name;
  std::uint8_t offset;
  std::uint8_t width;
};

/// Altitude is a 13-bit count of 25 ft steps from 0 ft (linear, not Gillham).
inline constexpr int kAltitudeStepFt = 25;
inline constexpr int kAltitudeBits = 13;
inline constexpr int kMaxAltitudeFt = ((1 << kAltitudeBits) - 1) * kAltitudeStepFt;

inline std::uint32_t encode_altitude(int altitude_ft) {
  if (altitude_ft < 0 || altitude_ft > kMaxAltitudeFt)
    throw Error(ErrorCode::range, "altitude " + std::to_string(altitude_ft) + " ft outside 0.." + std::to_string(kMaxAltitudeFt));
  return static_cast<std::uint32_t>(std::lround(static_cast<double>(altitude_ft) / kAltitudeStepFt));
}

inline int decode_altitude(std::uint32_t code) { return static_cast<int>(code) * kAltitudeStepFt; }

/// Coordination message identifier carried in the MU/MV `uds` field.
inline constexpr std::uint32_t kResolutionMessageUds = 0x30;

/// Resolution advisory complement bits (4-bit `rac` field).
namespace rac {
inline constexpr std::uint8_t kDoNotPassBelow = 0x8;
inline constexpr std::uint8_t kDoNotPassAbove = 0x4;
}  // namespace rac

struct FormatLayout {
  Direction direction;
  std::uint8_t code;
  std::uint8_t length;
  /// AP overlay: addressed frames XOR the target address over the CRC; plain
  /// frames carry the address in `aa` and a zero overlay.
  bool plain_address;
  bool has_altitude;
  std::uint8_t altitude_offset;
  std::vector<FieldSpec> fields;
};

namespace detail {

inline const std::vector<FormatLayout>& layouts() {
  static const std::vector<FormatLayout> kLayouts = {
      {Direction::uplink, 0, 56, false, false, 0, {{"rl", 8, 1}, {"aq", 13, 1}}},
      {Direction::uplink, 11, 56, false, false, 0, {{"pr", 5, 4}, {"ii", 9, 4}}},
      {Direction::uplink, 16, 112, false, false, 0,
       {{"rl", 8, 1}, {"aq", 13, 1}, {"uds", 32, 8}, {"rac", 54, 4}, {"rat", 58, 1}, {"mte", 59, 1}, {"sender", 64, 24}}},
      {Direction::downlink, 0, 56, false, true, 19, {{"vs", 5, 1}, {"cc", 6, 1}, {"sl", 8, 3}, {"ri", 13, 4}}},
      {Direction::downlink, 11, 56, true, false, 0, {{"ca", 5, 3}}},
      {Direction::downlink, 16, 112, false, true, 19,
       {{"vs", 5, 1}, {"sl", 8, 3}, {"ri", 13, 4}, {"uds", 32, 8}, {"rac", 54, 4}, {"rat", 58, 1}, {"mte", 59, 1}, {"sender", 64, 24}}},
      {Direction::downlink, 17, 112, true, true, 40, {{"ca", 5, 3}, {"tc", 32, 5}}},
  };
  return kLayouts;
}

inline constexpr std::uint8_t kPlainAddressOffset = 8;

}  // namespace detail

inline const FormatLayout* find_layout(Direction direction, std::uint8_t code) {
  for (const auto& l : detail::layouts())
    if (l.direction == direction && l.code == code) return &l;
  return nullptr;
}

namespace detail {

inline void apply_fields(ModeSFrame& frame, const FormatLayout& layout, const FieldMap& fields) {
  for (const auto& [name, value] : fields) {
    const FieldSpec* spec = nullptr;
    for (const auto& f : layout.fields)
      if (f.name == name) spec = &f;
    if (!spec)
      throw Error(ErrorCode::parameter, "field '" + name + "' is not part of format " + std::to_string(layout.code));
    if (spec->width < 32 && value >= (1u << spec->width))
      throw Error(ErrorCode::range, "field '" + name + "' value exceeds " + std::to_string(spec->width) + " bits");
    frame.set_field(spec->offset, spec->width, value);
  }
}

inline ModeSFrame blank_frame(const FormatLayout& layout) {
  ModeSFrame frame(layout.direction, Bits(layout.length, 0));
  frame.set_field(0, kHeaderBits, layout.code);
  return frame;
}

}  // namespace detail

/// Builds a sealed uplink frame. All-call interrogations are sealed with the
/// all-call address regardless of `address`.
inline ModeSFrame build_interrogation(std::uint8_t kind, IcaoAddress address, const FieldMap& fields = {}) {
  const FormatLayout* layout = find_layout(Direction::uplink, kind);
  if (!layout) throw Error(ErrorCode::unsupported_format, "uplink format " + std::to_string(kind) + " not supported");
  ModeSFrame frame = detail::blank_frame(*layout);
  detail::apply_fields(frame, *layout, fields);
  if (kind == static_cast<std::uint8_t>(UplinkFormat::all_call)) address = IcaoAddress::all_call();
  return seal_frame(std::move(frame), address);
}

inline ModeSFrame build_interrogation(UplinkFormat kind, IcaoAddress address, const FieldMap& fields = {}) {
  return build_interrogation(static_cast<std::uint8_t>(kind), address, fields);
}

/// Builds a sealed downlink frame. Plain-address formats (DF11, DF17) put the
/// address in the payload and seal with a zero overlay; DF0/DF16 overlay the
/// transponder's own address on the parity.
inline ModeSFrame build_reply(std::uint8_t kind, IcaoAddress address, int altitude_ft, const FieldMap& fields = {}) {
  const FormatLayout* layout = find_layout(Direction::downlink, kind);
  if (!layout) throw Error(ErrorCode::unsupported_format, "downlink format " + std::to_string(kind) + " not supported");
  ModeSFrame frame = detail::blank_frame(*layout);
  detail::apply_fields(frame, *layout, fields);
  if (layout->has_altitude) frame.set_field(layout->altitude_offset, kAltitudeBits, encode_altitude(altitude_ft));
  if (layout->plain_address) {
    frame.set_field(detail::kPlainAddressOffset, 24, address.value());
    return seal_frame(std::move(frame), IcaoAddress(0));
  }
  return seal_frame(std::move(frame), address);
}

inline ModeSFrame build_reply(DownlinkFormat kind, IcaoAddress address, int altitude_ft, const FieldMap& fields = {}) {
  return build_reply(static_cast<std::uint8_t>(kind), address, altitude_ft, fields);
}

struct DecodedMessage {
  Direction direction = Direction::downlink;
  std::uint8_t format = 0;
  /// Plain address, the expected address when verified, or the address
  /// recovered from the AP overlay when no expectation was supplied.
  IcaoAddress address;
  /// True when parity was actually checked against a known overlay.
  bool parity_verified = false;
  std::optional<int> altitude_ft;
  FieldMap fields;

  std::uint32_t field(const std::string& name) const {
    auto it = fields.find(name);
    return it == fields.end() ? 0 : it->second;
  }
  bool operator==(const DecodedMessage&) const = default;
};

enum class DecodeFailureReason { parity_failure, unknown_format };

struct DecodeFailure {
  DecodeFailureReason reason;
  std::uint8_t format = 0;
  IcaoAddress recovered_address;
};

using DecodeResult = std::variant<DecodedMessage, DecodeFailure>;

inline bool decoded_ok(const DecodeResult& r) { return std::holds_alternative<DecodedMessage>(r); }

/// Header first, then parity, then fields. A header whose format expects a
/// different frame length than supplied is a length error.
inline DecodeResult parse_frame(Direction direction, std::span<const std::uint8_t> bits,
                                std::optional<IcaoAddress> expected = std::nullopt) {
  if (!valid_frame_length(bits.size()))
    throw Error(ErrorCode::invalid_length, "frame must be 56 or 112 bits, got " + std::to_string(bits.size()));
  auto code = static_cast<std::uint8_t>(read_bits(bits, 0, kHeaderBits));
  const FormatLayout* layout = find_layout(direction, code);
  if (!layout) return DecodeFailure{DecodeFailureReason::unknown_format, code, {}};
  if (layout->length != bits.size())
    throw Error(ErrorCode::invalid_length, std::string(to_string(direction)) + " format " + std::to_string(code) + " is " +
                                               std::to_string(layout->length) + " bits, got " + std::to_string(bits.size()));

  ModeSFrame frame(direction, Bits(bits.begin(), bits.end()));
  DecodedMessage msg;
  msg.direction = direction;
  msg.format = code;

  IcaoAddress overlay_expected;
  bool check = true;
  if (layout->plain_address) {
    overlay_expected = IcaoAddress(0);
    msg.address = IcaoAddress(static_cast<std::uint32_t>(frame.field(detail::kPlainAddressOffset, 24)));
  } else if (direction == Direction::uplink && code == static_cast<std::uint8_t>(UplinkFormat::all_call)) {
    overlay_expected = IcaoAddress::all_call();
  } else if (expected) {
    overlay_expected = *expected;
  } else {
    check = false;
  }

  ParityCheck parity = verify_frame(frame, overlay_expected);
  if (check) {
    if (!parity.passed) return DecodeFailure{DecodeFailureReason::parity_failure, code, parity.recovered_address};
    msg.parity_verified = true;
    if (!layout->plain_address) msg.address = overlay_expected;
  } else {
    msg.address = parity.recovered_address;
  }

  for (const auto& f : layout->fields) msg.fields[std::string(f.name)] = static_cast<std::uint32_t>(frame.field(f.offset, f.width));
  if (layout->has_altitude)
    msg.altitude_ft = decode_altitude(static_cast<std::uint32_t>(frame.field(layout->altitude_offset, kAltitudeBits)));
  return msg;
}

inline DecodeResult parse_frame(const ModeSFrame& frame, std::optional<IcaoAddress> expected = std::nullopt) {
  return parse_frame(frame.direction(), frame.bits(), expected);
}

/// Frame length implied by a header's leading bit: formats 16..31 are long.
inline int length_from_header_bit(std::uint8_t first_bit) { return first_bit ? kLongFrameBits : kShortFrameBits; }

}  // namespace tcasim::modes
