#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>

#include "tcasim/modes/codec.hpp"
#include "tcasim/phy/dbpsk.hpp"
#include "tcasim/phy/ppm.hpp"

namespace tcasim::phy {

/// Passing this as the SNR disables noise entirely.
inline constexpr double kNoNoise = std::numeric_limits<double>::infinity();

/// Complex noise power for unit signal power.
inline double noise_power(double snr_db) { return std::pow(10.0, -snr_db / 10.0); }

/// Adds circular complex Gaussian noise of total variance 10^(-snr/10).
inline SampleBlock awgn(const SampleBlock& block, double snr_db, std::uint64_t seed) {
  if (std::isnan(snr_db)) throw Error(ErrorCode::parameter, "SNR must be a number");
  if (std::isinf(snr_db) && snr_db > 0) return block;
  SampleBlock out = block;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, std::sqrt(noise_power(snr_db) / 2.0));
  for (auto& s : out.samples) {
    double re = gauss(rng);
    double im = gauss(rng);
    s += Sample(static_cast<float>(re), static_cast<float>(im));
  }
  return out;
}

inline double measure_packet_loss(std::uint64_t sent, std::uint64_t received_valid) {
  if (sent == 0) throw Error(ErrorCode::undefined, "packet loss undefined with zero frames sent");
  if (received_valid > sent) throw Error(ErrorCode::parameter, "more valid frames than sent");
  return static_cast<double>(sent - received_valid) / static_cast<double>(sent);
}

struct LinkConfig {
  double snr_db = kNoNoise;
  int samples_per_chip = 2;

  bool noiseless() const { return std::isinf(snr_db) && snr_db > 0; }
};

struct Reception {
  modes::Bits bits;
  TimeNs timestamp_ns = 0;
};

/// Quiet samples placed around a burst so the framer sees a leading edge.
inline constexpr std::size_t kGuardChips = 8;

/// Modulates a reply arriving at `arrival_ns`, adds noise, and runs framer +
/// demodulator. Returns the first detected frame, or nothing if no preamble
/// was found.
inline std::optional<Reception> receive_reply(std::span<const std::uint8_t> frame, TimeNs arrival_ns, const LinkConfig& link,
                                              std::uint64_t seed) {
  const int sps = link.samples_per_chip;
  SampleBlock burst = ppm_modulate(frame, sps);
  SampleBlock stream;
  stream.samples_per_symbol = sps;
  stream.sample_period_ns = burst.sample_period_ns;
  const std::size_t guard = kGuardChips * static_cast<std::size_t>(sps);
  stream.start_timestamp_ns = arrival_ns - static_cast<TimeNs>(kGuardChips * kReplyChipNs);
  stream.samples.assign(guard, Sample(0, 0));
  stream.samples.insert(stream.samples.end(), burst.samples.begin(), burst.samples.end());
  stream.samples.insert(stream.samples.end(), guard, Sample(0, 0));
  stream = awgn(stream, link.snr_db, seed);

  auto hits = ppm_frame_detect(stream);
  if (hits.empty()) return std::nullopt;
  const auto& hit = hits.front();
  const std::size_t first_chip = hit.preamble_offset + kReplyPreamble.size() * static_cast<std::size_t>(sps);
  if (first_chip + 2 * static_cast<std::size_t>(sps) > stream.samples.size()) return std::nullopt;
  auto p = detail::power(stream);
  int nbits = modes::length_from_header_bit(static_cast<std::uint8_t>(detail::ppm_decide(p, first_chip, sps)));
  try {
    return Reception{ppm_demodulate(stream, hit, nbits), hit.detect_timestamp_ns};
  } catch (const Error&) {
    return std::nullopt;
  }
}

/// Uplink counterpart of receive_reply using the DBPSK interrogation modem.
inline std::optional<Reception> receive_interrogation(std::span<const std::uint8_t> frame, TimeNs arrival_ns,
                                                      const LinkConfig& link, std::uint64_t seed) {
  SampleBlock burst = dbpsk_modulate_interrogation(frame);
  SampleBlock stream;
  stream.samples_per_symbol = 1;
  stream.sample_period_ns = kInterrogationChipNs;
  stream.start_timestamp_ns = arrival_ns - static_cast<TimeNs>(kGuardChips * kInterrogationChipNs);
  stream.samples.assign(kGuardChips, Sample(0, 0));
  stream.samples.insert(stream.samples.end(), burst.samples.begin(), burst.samples.end());
  stream.samples.insert(stream.samples.end(), kGuardChips, Sample(0, 0));
  stream = awgn(stream, link.snr_db, seed);

  auto hits = dbpsk_frame_detect(stream);
  if (hits.empty()) return std::nullopt;
  const auto& hit = hits.front();
  modes::Bits bits = dbpsk_demodulate(stream, hit.preamble_offset + kSyncOffsetInBlock);
  bits.resize(static_cast<std::size_t>(modes::length_from_header_bit(bits[0])));
  return Reception{std::move(bits), hit.detect_timestamp_ns};
}

}  // namespace tcasim::phy
