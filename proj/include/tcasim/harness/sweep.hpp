#pragma once

#include <cmath>
#include <ostream>
#include <string>
#include <vector>

#include "tcasim/harness/simulate.hpp"

namespace tcasim::harness {

inline constexpr std::size_t kDefaultCorpusSize = 600;

struct FrameCorpus {
  std::vector<modes::ModeSFrame> uplink;
  std::vector<modes::ModeSFrame> downlink;
};

/// First `size` frames per link transmitted during a noiseless run.
inline FrameCorpus collect_corpus(const Scenario& s, std::size_t size = kDefaultCorpusSize) {
  Scenario quiet = s;
  quiet.channel.awgn = false;
  const auto result = simulate(quiet);
  FrameCorpus c;
  for (const auto& r : result.log) {
    if (r.kind != "transmit") continue;
    const bool up = is_uplink_class(r.outcome);
    auto& bucket = up ? c.uplink : c.downlink;
    if (bucket.size() >= size) continue;
    bucket.push_back(modes::ModeSFrame::from_hex(up ? modes::Direction::uplink : modes::Direction::downlink, r.frame));
  }
  return c;
}

struct LossRow {
  double snr_db = 0.0;
  std::string link;
  std::uint64_t sent = 0;
  std::uint64_t received_valid = 0;
  std::optional<double> packet_loss() const { return LinkCounts{sent, received_valid}.packet_loss(); }
};

/// A frame survives when the framer finds it and its parity overlay is intact.
inline bool survives(const modes::ModeSFrame& sent, const std::optional<phy::Reception>& rx) {
  if (!rx || rx->bits.size() != sent.size()) return false;
  const modes::ModeSFrame got(sent.direction(), rx->bits);
  return (modes::crc24(got.body()) ^ got.ap_field()) == (modes::crc24(sent.body()) ^ sent.ap_field());
}

/// Pushes the corpus through both modems at each SNR. Frame i uses the same
/// noise seed at every SNR so the rows differ only in noise power.
inline std::vector<LossRow> loss_sweep(const FrameCorpus& corpus, const std::vector<double>& snrs, std::uint64_t seed,
                                       int samples_per_chip = 2) {
  std::vector<double> ordered = snrs;
  std::sort(ordered.begin(), ordered.end());
  std::vector<LossRow> rows;
  for (double snr : ordered) {
    phy::LinkConfig link{snr, samples_per_chip};
    for (const bool up : {true, false}) {
      const auto& frames = up ? corpus.uplink : corpus.downlink;
      LossRow row{snr, up ? "uplink" : "downlink", 0, 0};
      for (std::size_t i = 0; i < frames.size(); ++i) {
        const std::uint64_t fs = sim::splitmix64(seed ^ sim::splitmix64((up ? 0x8000000000000000ull : 0) | i));
        const auto rx = up ? phy::receive_interrogation(frames[i].bits(), 0, link, fs) : phy::receive_reply(frames[i].bits(), 0, link, fs);
        ++row.sent;
        if (survives(frames[i], rx)) ++row.received_valid;
      }
      rows.push_back(row);
    }
  }
  return rows;
}

inline std::vector<LossRow> loss_sweep(const Scenario& s, const std::vector<double>& snrs, std::size_t corpus_size = kDefaultCorpusSize) {
  return loss_sweep(collect_corpus(s, corpus_size), snrs, s.seed.value_or(0), s.channel.samples_per_chip);
}

inline std::string snr_label(double snr) { return std::isinf(snr) ? "inf" : sim::fmt(snr, 3); }

inline void write_loss_csv(std::ostream& out, const std::vector<LossRow>& rows) {
  out << "snr_db,link,sent,received_valid,packet_loss\n";
  for (const auto& r : rows) {
    auto loss = r.packet_loss();
    out << snr_label(r.snr_db) << ',' << r.link << ',' << r.sent << ',' << r.received_valid << ','
        << (loss ? sim::fmt(*loss, 6) : "undefined") << '\n';
  }
}

}  // namespace tcasim::harness
