#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "tcasim/modes/codec.hpp"

using namespace tcasim;
using namespace tcasim::modes;

namespace {

Bits to_bits(const std::vector<std::uint8_t>& v) { return Bits(v.begin(), v.end()); }

FieldMap random_fields(const FormatLayout& layout, std::mt19937_64& rng) {
  FieldMap m;
  for (const auto& f : layout.fields) m[std::string(f.name)] = static_cast<std::uint32_t>(rng() & ((1ull << f.width) - 1));
  return m;
}

struct Built {
  ModeSFrame frame;
  IcaoAddress address;
  int altitude_ft;
  FieldMap fields;
};

Built random_frame(const FormatLayout& layout, std::mt19937_64& rng) {
  IcaoAddress a(static_cast<std::uint32_t>(rng() % 0xFFFFFF));
  FieldMap f = random_fields(layout, rng);
  int alt = static_cast<int>(rng() % (kMaxAltitudeFt / 25 + 1)) * 25;
  if (layout.direction == Direction::uplink) return {build_interrogation(layout.code, a, f), a, 0, f};
  return {build_reply(layout.code, a, alt, f), a, alt, f};
}

}  // namespace

TEST(Crc24, ZeroBodyHasZeroRemainder) {
  EXPECT_EQ(crc24(Bits(88, 0)), 0u);
  EXPECT_EQ(crc24(Bits(32, 0)), 0u);
}

TEST(Crc24, LastBitMatchesBitSerialOracle) {
  std::vector<std::uint8_t> b(88, 0);
  b.back() = 1;
  EXPECT_EQ(crc24(to_bits(b)), oracle::crc24(b));
  EXPECT_EQ(oracle::crc24(b), 0xFFF409u);
}

TEST(Crc24, RandomBodiesMatchOracle) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 1000; ++i) {
    auto b = oracle::random_bits(rng, i % 2 ? 88 : 32);
    ASSERT_EQ(crc24(to_bits(b)), oracle::crc24(b)) << i;
  }
}

TEST(Crc24, RejectsOtherLengths) {
  EXPECT_THROW(crc24(Bits(56, 0)), Error);
  EXPECT_THROW(crc24(Bits(0)), Error);
}

TEST(Seal, ZeroAddressLeavesRawCrc) {
  std::mt19937_64 rng(2);
  ModeSFrame f(Direction::downlink, to_bits(oracle::random_bits(rng, 112)));
  auto s = seal_frame(f, IcaoAddress(0));
  EXPECT_EQ(s.ap_field(), crc24(s.body()));
}

TEST(Seal, AllCallComplementsCrc) {
  std::mt19937_64 rng(3);
  ModeSFrame f(Direction::uplink, to_bits(oracle::random_bits(rng, 56)));
  auto s = seal_frame(f, IcaoAddress::all_call());
  EXPECT_EQ(s.ap_field(), (~crc24(s.body())) & 0xFFFFFFu);
}

TEST(Seal, VerifyRoundTripOnRandomFrames) {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 1000; ++i) {
    IcaoAddress a(static_cast<std::uint32_t>(rng() & 0xFFFFFF));
    ModeSFrame f(Direction::downlink, to_bits(oracle::random_bits(rng, i % 2 ? 112 : 56)));
    ASSERT_TRUE(verify_frame(seal_frame(f, a), a).passed);
  }
}

TEST(Verify, WrongAddressRecoversSealingAddress) {
  std::mt19937_64 rng(5);
  ModeSFrame f(Direction::downlink, to_bits(oracle::random_bits(rng, 56)));
  const IcaoAddress a(0x4840d6), wrong(0x3c6586);
  auto s = seal_frame(f, a);
  auto r = verify_frame(s, wrong);
  EXPECT_FALSE(r.passed);
  EXPECT_EQ(r.recovered_address, a);
  auto bits = std::vector<std::uint8_t>(s.bits().begin(), s.bits().end());
  std::vector<std::uint8_t> body(bits.begin(), bits.end() - 24);
  EXPECT_EQ(oracle::crc24(body) ^ oracle::bits_value(bits, 32, 24), a.value());
}

class BitFlip : public ::testing::TestWithParam<int> {};

TEST_P(BitFlip, EverySingleFlipIsRejected) {
  const int n = GetParam();
  std::mt19937_64 rng(6 + n);
  const IcaoAddress a(0xABCDEF);
  auto s = seal_frame(ModeSFrame(Direction::downlink, to_bits(oracle::random_bits(rng, n))), a);
  int rejected = 0;
  for (int i = 0; i < n; ++i) {
    Bits b(s.bits().begin(), s.bits().end());
    b[i] ^= 1;
    if (!verify_frame(ModeSFrame(Direction::downlink, b), a).passed) ++rejected;
  }
  EXPECT_EQ(rejected, n);
}

INSTANTIATE_TEST_SUITE_P(Lengths, BitFlip, ::testing::Values(56, 112));

TEST(Build, AllCallInterrogationUsesAllOnesOverlay) {
  auto f = build_interrogation(UplinkFormat::all_call, IcaoAddress(0x123456));
  EXPECT_EQ(f.format_code(), 11);
  EXPECT_TRUE(verify_frame(f, IcaoAddress(0xFFFFFF)).passed);
}

TEST(Build, SurveillanceInterrogationVerifiesWithTarget) {
  const IcaoAddress a(0x4840d6);
  auto f = build_interrogation(UplinkFormat::short_surveillance, a, {{"rl", 0}, {"aq", 1}});
  EXPECT_TRUE(verify_frame(f, a).passed);
  EXPECT_EQ(f, build_interrogation(UplinkFormat::short_surveillance, a, {{"rl", 0}, {"aq", 1}}));
}

TEST(Build, UnsupportedFormatsThrow) {
  EXPECT_THROW(build_interrogation(4, IcaoAddress(1)), Error);
  EXPECT_THROW(build_reply(5, IcaoAddress(1), 0), Error);
}

TEST(Build, AltitudeOutOfRangeThrows) {
  EXPECT_THROW(build_reply(DownlinkFormat::short_surveillance, IcaoAddress(1), kMaxAltitudeFt + 25), Error);
  EXPECT_THROW(build_reply(DownlinkFormat::short_surveillance, IcaoAddress(1), -25), Error);
}

TEST(Build, ZeroAltitudeEncodesZero) {
  auto f = build_reply(DownlinkFormat::short_surveillance, IcaoAddress(0x10), 0);
  EXPECT_EQ(f.field(19, 13), 0u);
}

TEST(Build, FieldOverflowThrows) {
  EXPECT_THROW(build_reply(DownlinkFormat::all_call_reply, IcaoAddress(1), 0, {{"ca", 8}}), Error);
  EXPECT_THROW(build_reply(DownlinkFormat::all_call_reply, IcaoAddress(1), 0, {{"zz", 0}}), Error);
}

TEST(Parse, SquitterYieldsPlainAddressWithoutExpectation) {
  const IcaoAddress a(0x4840d6);
  auto r = parse_frame(build_reply(DownlinkFormat::all_call_reply, a, 0, {{"ca", 5}}));
  ASSERT_TRUE(decoded_ok(r));
  const auto& m = std::get<DecodedMessage>(r);
  EXPECT_EQ(m.address, a);
  EXPECT_TRUE(m.parity_verified);
  EXPECT_EQ(m.field("ca"), 5u);
}

TEST(Parse, CorruptedSquitterFailsParity) {
  auto f = build_reply(DownlinkFormat::extended_squitter, IcaoAddress(0x4840d6), 41400, {{"tc", 11}});
  Bits b(f.bits().begin(), f.bits().end());
  b[60] ^= 1;
  auto r = parse_frame(Direction::downlink, b);
  ASSERT_FALSE(decoded_ok(r));
  EXPECT_EQ(std::get<DecodeFailure>(r).reason, DecodeFailureReason::parity_failure);
}

TEST(Parse, LengthMismatchThrows) {
  auto f = build_reply(DownlinkFormat::short_surveillance, IcaoAddress(7), 1000);
  Bits b(f.bits().begin(), f.bits().end());
  b.resize(112, 0);
  EXPECT_THROW(parse_frame(Direction::downlink, b), Error);
  EXPECT_THROW(parse_frame(Direction::downlink, Bits(60, 0)), Error);
}

TEST(Parse, UnknownHeaderIsReported) {
  Bits b(56, 0);
  write_bits(b, 0, 5, 4);
  auto r = parse_frame(Direction::downlink, b);
  ASSERT_FALSE(decoded_ok(r));
  EXPECT_EQ(std::get<DecodeFailure>(r).reason, DecodeFailureReason::unknown_format);
}

TEST(Parse, AddressedReplyWithoutExpectationRecoversAddress) {
  const IcaoAddress a(0x3c6586);
  auto r = parse_frame(build_reply(DownlinkFormat::short_surveillance, a, 40750));
  ASSERT_TRUE(decoded_ok(r));
  EXPECT_FALSE(std::get<DecodedMessage>(r).parity_verified);
  EXPECT_EQ(std::get<DecodedMessage>(r).address, a);
  EXPECT_EQ(*std::get<DecodedMessage>(r).altitude_ft, 40750);
}

class RoundTrip : public ::testing::TestWithParam<std::pair<Direction, int>> {};

TEST_P(RoundTrip, RandomFieldsSurviveBuildAndParse) {
  const auto [dir, code] = GetParam();
  const FormatLayout* layout = find_layout(dir, static_cast<std::uint8_t>(code));
  ASSERT_NE(layout, nullptr);
  std::mt19937_64 rng(100 + code + (dir == Direction::uplink ? 50 : 0));
  for (int i = 0; i < 10000; ++i) {
    auto b = random_frame(*layout, rng);
    ASSERT_EQ(b.frame.size(), layout->length);
    ASSERT_EQ(b.frame.format_code(), code);
    auto r = parse_frame(b.frame, b.address);
    ASSERT_TRUE(decoded_ok(r)) << i;
    const auto& m = std::get<DecodedMessage>(r);
    EXPECT_EQ(m.fields, b.fields);
    if (dir == Direction::uplink && code == 11)
      EXPECT_EQ(m.address, IcaoAddress::all_call());
    else
      EXPECT_EQ(m.address, b.address);
    if (layout->has_altitude) EXPECT_EQ(*m.altitude_ft, b.altitude_ft);
  }
}

INSTANTIATE_TEST_SUITE_P(Formats, RoundTrip,
                         ::testing::Values(std::pair{Direction::uplink, 0}, std::pair{Direction::uplink, 11},
                                           std::pair{Direction::uplink, 16}, std::pair{Direction::downlink, 0},
                                           std::pair{Direction::downlink, 11}, std::pair{Direction::downlink, 16},
                                           std::pair{Direction::downlink, 17}));

TEST(Hex, RoundTripAndMalformedInput) {
  auto f = build_reply(DownlinkFormat::all_call_reply, IcaoAddress(0x4840d6), 0, {{"ca", 5}});
  EXPECT_EQ(ModeSFrame::from_hex(Direction::downlink, f.hex()), f);
  EXPECT_THROW(hex_to_bits("5d4840d6"), Error);
  EXPECT_THROW(hex_to_bits("5d4840d6zz0000"), Error);
}

TEST(Icao, ParseAndRange) {
  EXPECT_EQ(IcaoAddress::parse("0x4840D6").value(), 0x4840d6u);
  EXPECT_THROW(IcaoAddress::parse("1234567"), Error);
  EXPECT_THROW(IcaoAddress(0x1000000), Error);
}
