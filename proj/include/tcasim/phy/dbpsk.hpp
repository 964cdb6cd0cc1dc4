#pragma once

#include <array>
#include <cmath>
#include <span>
#include <vector>

#include "tcasim/modes/frame.hpp"
#include "tcasim/phy/sample_block.hpp"

namespace tcasim::phy {

// Interrogation layout, one sample per 0.25 us chip:
//   [0,16)   Mode A/C suppression pulse pair
//   [16,23)  sync preamble, phase reversal between its 5th and 6th sample
//   [23,..)  differentially encoded payload, then a two-sample zero pad,
//            then zero fill so a 120-sample slice from the first payload
//            sample always fits.
inline constexpr std::array<std::uint8_t, 16> kSuppressionPair = {1, 1, 1, 0, 0, 0, 0, 0, 1, 1, 1, 0, 0, 0, 0, 0};
inline constexpr std::size_t kSyncPreambleLength = 7;
inline constexpr std::size_t kSyncReversalIndex = 5;  // first preamble sample after the reversal
inline constexpr std::size_t kInterrogationPad = 2;
inline constexpr std::size_t kInterrogationSlice = 120;
inline constexpr double kInterrogationChipNs = 250.0;

inline constexpr std::size_t kSyncOffsetInBlock = kSuppressionPair.size() + kSyncReversalIndex;
inline constexpr std::size_t kPayloadOffsetInBlock = kSuppressionPair.size() + kSyncPreambleLength;
inline constexpr std::size_t kInterrogationBlockSamples = kPayloadOffsetInBlock + kInterrogationSlice;

/// Payload starts two samples after the sync point.
constexpr std::size_t payload_offset_from_sync(std::size_t sync_offset) { return sync_offset + 2; }

inline SampleBlock dbpsk_modulate_interrogation(std::span<const std::uint8_t> frame, TimeNs start_ns = 0) {
  if (!modes::valid_frame_length(frame.size()))
    throw Error(ErrorCode::parameter, "interrogation must be 56 or 112 bits, got " + std::to_string(frame.size()));
  SampleBlock block;
  block.samples_per_symbol = 1;
  block.start_timestamp_ns = start_ns;
  block.sample_period_ns = kInterrogationChipNs;
  block.samples.reserve(kInterrogationBlockSamples);
  for (auto a : kSuppressionPair) block.samples.emplace_back(static_cast<float>(a), 0.0f);
  float phase = 1.0f;
  for (std::size_t i = 0; i < kSyncPreambleLength; ++i) {
    if (i == kSyncReversalIndex) phase = -phase;
    block.samples.emplace_back(phase, 0.0f);
  }
  for (auto bit : frame) {
    if (bit) phase = -phase;
    block.samples.emplace_back(phase, 0.0f);
  }
  block.samples.resize(kInterrogationBlockSamples, Sample(0.0f, 0.0f));
  return block;
}

/// Differentially decodes the full 112-symbol slice; a short message leaves
/// trailing zeros the caller drops after reading the header.
inline modes::Bits dbpsk_demodulate(const SampleBlock& stream, std::size_t sync_offset) {
  const std::size_t first = payload_offset_from_sync(sync_offset);
  if (sync_offset == 0 || first + kInterrogationSlice > stream.samples.size())
    throw Error(ErrorCode::truncation, "interrogation slice extends past the stream");
  modes::Bits bits(modes::kLongFrameBits);
  for (std::size_t k = 0; k < bits.size(); ++k) {
    const Sample prod = stream.samples[first + k] * std::conj(stream.samples[first + k - 1]);
    bits[k] = prod.real() < 0.0f ? 1 : 0;
  }
  return bits;
}

namespace detail {

inline double suppression_score(std::span<const double> power, std::size_t offset) {
  double dot = 0, energy = 0;
  for (std::size_t i = 0; i < kSuppressionPair.size(); ++i) {
    double v = power[offset + i];
    energy += v * v;
    if (kSuppressionPair[i]) dot += v;
  }
  if (energy <= 0) return 0.0;
  return dot / (std::sqrt(6.0) * std::sqrt(energy));
}

}  // namespace detail

/// Interrogation framer: correlates the suppression pair and confirms the
/// sync reversal. `preamble_offset` is the first suppression sample.
inline std::vector<FrameDetection> dbpsk_frame_detect(const SampleBlock& stream, double threshold = 0.75) {
  std::vector<FrameDetection> hits;
  const std::size_t n = stream.samples.size();
  if (n < kInterrogationBlockSamples) return hits;
  std::vector<double> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = std::norm(stream.samples[i]);

  auto reversal_ok = [&](std::size_t off) {
    const std::size_t s = off + kSyncOffsetInBlock;
    float before = (stream.samples[s - 1] * std::conj(stream.samples[s - 2])).real();
    float at = (stream.samples[s] * std::conj(stream.samples[s - 1])).real();
    return before > 0.0f && at < 0.0f;
  };

  const std::size_t last = n - kInterrogationBlockSamples;
  std::size_t k = 0;
  while (k <= last) {
    double score = detail::suppression_score(p, k);
    if (score < threshold || !reversal_ok(k)) {
      ++k;
      continue;
    }
    std::size_t best = k;
    double best_score = score;
    for (std::size_t j = k + 1; j < k + kSuppressionPair.size() && j <= last; ++j) {
      double s = detail::suppression_score(p, j);
      if (s > best_score && reversal_ok(j)) {
        best = j;
        best_score = s;
      }
    }
    hits.push_back({best, stream.timestamp_at(best), best_score});
    k = best + kPayloadOffsetInBlock + kInterrogationSlice;
  }
  return hits;
}

}  // namespace tcasim::phy
