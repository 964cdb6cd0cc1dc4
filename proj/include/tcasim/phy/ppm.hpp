#pragma once

#include <array>
#include <cmath>
#include <span>
#include <vector>

#include "tcasim/modes/frame.hpp"
#include "tcasim/phy/sample_block.hpp"

namespace tcasim::phy {

/// Reply preamble on the half-microsecond chip grid (pulses at 0, 1, 3.5, 4.5 us).
inline constexpr std::array<std::uint8_t, 16> kReplyPreamble = {1, 0, 1, 0, 0, 0, 0, 1, 0, 1, 0, 0, 0, 0, 0, 0};
inline constexpr double kReplyChipNs = 500.0;
inline constexpr double kDefaultDetectionThreshold = 0.75;

/// Samples occupied by a whole reply (preamble + two chips per bit).
inline std::size_t ppm_frame_samples(std::size_t nbits, int sps) {
  return (kReplyPreamble.size() + 2 * nbits) * static_cast<std::size_t>(sps);
}

/// Bit 1 -> pulse in the first chip, bit 0 -> pulse in the second; each chip
/// is `sps` samples. Output amplitudes are 0 or 1.
inline SampleBlock ppm_modulate(std::span<const std::uint8_t> frame, int sps, TimeNs start_ns = 0) {
  if (sps < 1) throw Error(ErrorCode::parameter, "samples per symbol must be >= 1");
  if (!modes::valid_frame_length(frame.size()))
    throw Error(ErrorCode::parameter, "PPM frame must be 56 or 112 bits, got " + std::to_string(frame.size()));
  SampleBlock block;
  block.samples_per_symbol = sps;
  block.start_timestamp_ns = start_ns;
  block.sample_period_ns = kReplyChipNs / sps;
  block.samples.reserve(ppm_frame_samples(frame.size(), sps));
  auto emit = [&](float v) { block.samples.insert(block.samples.end(), static_cast<std::size_t>(sps), Sample(v, 0.0f)); };
  for (auto chip : kReplyPreamble) emit(chip);
  for (auto bit : frame) {
    emit(bit ? 1.0f : 0.0f);
    emit(bit ? 0.0f : 1.0f);
  }
  return block;
}

namespace detail {

inline std::vector<double> power(const SampleBlock& block) {
  std::vector<double> p(block.samples.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::norm(block.samples[i]);
  return p;
}

inline int ppm_decide(std::span<const double> p, std::size_t first_chip, int sps) {
  double e1 = 0, e0 = 0;
  for (int k = 0; k < sps; ++k) {
    e1 += p[first_chip + k];
    e0 += p[first_chip + sps + k];
  }
  return e1 > e0 ? 1 : 0;  // equal energies decode as 0
}

}  // namespace detail

/// Normalized correlation of the power window starting at `offset` with the
/// unit-energy preamble template. Zero-energy windows score 0.
inline double ppm_preamble_score(std::span<const double> power, std::size_t offset, int sps) {
  const std::size_t len = kReplyPreamble.size() * static_cast<std::size_t>(sps);
  double dot = 0, energy = 0;
  for (std::size_t i = 0; i < len; ++i) {
    double v = power[offset + i];
    energy += v * v;
    if (kReplyPreamble[i / static_cast<std::size_t>(sps)]) dot += v;
  }
  if (energy <= 0) return 0.0;
  const double template_norm = std::sqrt(4.0 * sps);
  return dot / (template_norm * std::sqrt(energy));
}

/// Scans for reply preambles. Each hit is the best-scoring offset within one
/// preamble length of the first threshold crossing; after a hit the scan
/// resumes past the frame whose length the header's first bit announces.
inline std::vector<FrameDetection> ppm_frame_detect(const SampleBlock& stream, double threshold = kDefaultDetectionThreshold) {
  std::vector<FrameDetection> hits;
  const int sps = stream.samples_per_symbol;
  const std::size_t plen = kReplyPreamble.size() * static_cast<std::size_t>(sps);
  if (stream.samples.size() < plen) return hits;
  const auto p = detail::power(stream);
  const std::size_t last = p.size() - plen;
  std::size_t k = 0;
  while (k <= last) {
    double score = ppm_preamble_score(p, k, sps);
    if (score < threshold) {
      ++k;
      continue;
    }
    std::size_t best = k;
    double best_score = score;
    for (std::size_t j = k + 1; j < k + plen && j <= last; ++j) {
      double s = ppm_preamble_score(p, j, sps);
      if (s > best_score) {
        best = j;
        best_score = s;
      }
    }
    hits.push_back({best, stream.timestamp_at(best), best_score});
    std::size_t first_chip = best + plen;
    std::size_t skip = plen;
    if (first_chip + 2 * static_cast<std::size_t>(sps) <= p.size()) {
      int nbits = modes::length_from_header_bit(static_cast<std::uint8_t>(detail::ppm_decide(p, first_chip, sps)));
      skip = ppm_frame_samples(static_cast<std::size_t>(nbits), sps);
    }
    k = best + skip;
  }
  return hits;
}

/// Energy comparison between the two chips of each bit after the preamble.
inline modes::Bits ppm_demodulate(const SampleBlock& stream, const FrameDetection& detection, int nbits) {
  if (nbits != modes::kShortFrameBits && nbits != modes::kLongFrameBits)
    throw Error(ErrorCode::parameter, "PPM demodulation length must be 56 or 112");
  const int sps = stream.samples_per_symbol;
  const std::size_t start = detection.preamble_offset + kReplyPreamble.size() * static_cast<std::size_t>(sps);
  const std::size_t need = start + 2 * static_cast<std::size_t>(nbits) * static_cast<std::size_t>(sps);
  if (need > stream.samples.size()) throw Error(ErrorCode::truncation, "stream ends before the frame does");
  const auto p = detail::power(stream);
  modes::Bits bits(static_cast<std::size_t>(nbits));
  for (int i = 0; i < nbits; ++i)
    bits[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(detail::ppm_decide(p, start + 2 * static_cast<std::size_t>(i * sps), sps));
  return bits;
}

}  // namespace tcasim::phy
