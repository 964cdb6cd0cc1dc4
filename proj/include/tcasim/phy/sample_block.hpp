#pragma once

#include <bit>
#include <complex>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <vector>

#include "tcasim/error.hpp"
#include "tcasim/units.hpp"

namespace tcasim::phy {

using Sample = std::complex<float>;

/// Timestamped baseband samples; `start_timestamp_ns` is the instant of
/// samples[0], which modulators place on the first preamble sample.
struct SampleBlock {
  std::vector<Sample> samples;
  int samples_per_symbol = 1;
  TimeNs start_timestamp_ns = 0;
  double sample_period_ns = 500.0;

  std::size_t size() const { return samples.size(); }
  TimeNs timestamp_at(std::size_t index) const {
    return start_timestamp_ns + static_cast<TimeNs>(std::llround(static_cast<double>(index) * sample_period_ns));
  }
};

struct FrameDetection {
  std::size_t preamble_offset = 0;
  TimeNs detect_timestamp_ns = 0;
  double correlation_score = 0.0;
};

// Fixture file: "MSSB" magic, u32 samples_per_symbol, u64 sample count, then
// interleaved I/Q as 32-bit little-endian floats.
inline constexpr char kSampleFileMagic[4] = {'M', 'S', 'S', 'B'};

namespace detail {

inline void put_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 4);
}

inline std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) throw Error(ErrorCode::io, "truncated sample file");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

inline void put_f32(std::ostream& out, float f) { put_u32(out, std::bit_cast<std::uint32_t>(f)); }
inline float get_f32(std::istream& in) { return std::bit_cast<float>(get_u32(in)); }

}  // namespace detail

inline void write_sample_file(std::ostream& out, const SampleBlock& block) {
  out.write(kSampleFileMagic, 4);
  detail::put_u32(out, static_cast<std::uint32_t>(block.samples_per_symbol));
  auto n = static_cast<std::uint64_t>(block.samples.size());
  detail::put_u32(out, static_cast<std::uint32_t>(n & 0xFFFFFFFFu));
  detail::put_u32(out, static_cast<std::uint32_t>(n >> 32));
  for (const auto& s : block.samples) {
    detail::put_f32(out, s.real());
    detail::put_f32(out, s.imag());
  }
  if (!out) throw Error(ErrorCode::io, "failed writing sample file");
}

/// The file carries no timestamp or sample period; callers restore those.
inline SampleBlock read_sample_file(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kSampleFileMagic, 4) != 0) throw Error(ErrorCode::io, "bad sample file magic");
  SampleBlock block;
  block.samples_per_symbol = static_cast<int>(detail::get_u32(in));
  std::uint64_t lo = detail::get_u32(in);
  std::uint64_t hi = detail::get_u32(in);
  std::uint64_t n = lo | (hi << 32);
  block.samples.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    float re = detail::get_f32(in);
    float im = detail::get_f32(in);
    block.samples.emplace_back(re, im);
  }
  return block;
}

}  // namespace tcasim::phy
