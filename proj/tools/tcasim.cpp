#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tcasim/tcasim.hpp"

namespace {

using namespace tcasim;

enum Exit { kOk = 0, kFailed = 1, kUsage = 2, kAbort = 3 };

std::vector<double> parse_snr_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "inf" || item == "none") {
      out.push_back(phy::kNoNoise);
      continue;
    }
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || item.empty()) throw Error(ErrorCode::parameter, "malformed SNR value '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw Error(ErrorCode::parameter, "empty SNR list");
  return out;
}

int write_to(const std::string& path, const std::function<void(std::ostream&)>& body) {
  if (path.empty() || path == "-") {
    body(std::cout);
    return kOk;
  }
  std::ofstream out(path);
  if (!out) {
    std::cerr << "error: cannot write " << path << '\n';
    return kUsage;
  }
  body(out);
  return kOk;
}

int run_simulate(const std::string& file, std::optional<std::uint64_t> seed, const std::string& log_path, const std::string& metrics_path) {
  const auto scenario = harness::load_scenario_file(file);
  const auto result = harness::simulate(scenario, seed);
  if (!log_path.empty() && write_to(log_path, [&](std::ostream& o) { sim::write_event_log(o, result.log); }) != kOk) return kUsage;
  if (!metrics_path.empty() && write_to(metrics_path, [&](std::ostream& o) { harness::write_metrics_csv(o, result.metrics); }) != kOk)
    return kUsage;
  if (result.aborted) {
    std::cerr << "aborted: " << result.abort_message << '\n';
    return kAbort;
  }
  std::cerr << scenario.name << ": " << (result.success.holds ? "success" : "failure") << " (" << result.success.detail << ")\n";
  return result.success.holds ? kOk : kFailed;
}

int run_sweep(const std::string& file, const std::string& snrs, std::size_t corpus, const std::string& out_path) {
  const auto scenario = harness::load_scenario_file(file);
  const auto rows = harness::loss_sweep(scenario, parse_snr_list(snrs), corpus);
  return write_to(out_path, [&](std::ostream& o) { harness::write_loss_csv(o, rows); });
}

int run_fta(const std::string& file, bool defaults, const std::vector<std::string>& overrides, bool as_json, const std::string& out_path) {
  if (defaults == !file.empty()) {
    std::cerr << "error: give either a document or --defaults\n";
    return kUsage;
  }
  harness::FtaDocument doc = defaults ? harness::FtaDocument{} : harness::load_fta_file(file);
  for (const auto& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::parameter, "override must be key=value, got '" + kv + "'");
    std::size_t used = 0;
    const std::string value = kv.substr(eq + 1);
    double v = 0;
    try {
      v = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (value.empty() || used != value.size()) throw Error(ErrorCode::parameter, "malformed override value '" + value + "'");
    harness::apply_override(doc, kv.substr(0, eq), v);
  }
  const auto rows = harness::fta_report(doc);
  return write_to(out_path, [&](std::ostream& o) {
    if (as_json)
      o << harness::fta_rows_json(rows).dump(2) << '\n';
    else
      fta::write_sweep_csv(o, rows);
  });
}

int run_codec(const std::string& hex, bool uplink, const std::string& address) {
  const auto dir = uplink ? modes::Direction::uplink : modes::Direction::downlink;
  std::optional<modes::IcaoAddress> expected;
  if (!address.empty()) expected = modes::IcaoAddress::parse(address);
  const auto frame = modes::ModeSFrame::from_hex(dir, hex);
  const auto result = modes::parse_frame(frame, expected);
  std::cout << "direction: " << modes::to_string(dir) << '\n';
  if (const auto* f = std::get_if<modes::DecodeFailure>(&result)) {
    std::cout << "format: " << int(f->format) << '\n';
    if (f->reason == modes::DecodeFailureReason::unknown_format) {
      std::cout << "verdict: unknown format\n";
    } else {
      std::cout << "recovered_address: " << f->recovered_address.hex() << '\n';
      std::cout << "verdict: parity failure\n";
    }
    return kFailed;
  }
  const auto& m = std::get<modes::DecodedMessage>(result);
  std::cout << "format: " << int(m.format) << '\n';
  std::cout << "address: " << m.address.hex() << '\n';
  if (m.altitude_ft) std::cout << "altitude_ft: " << *m.altitude_ft << '\n';
  for (const auto& [name, value] : m.fields) std::cout << name << ": " << value << '\n';
  std::cout << "verdict: " << (m.parity_verified ? "parity ok" : "parity unchecked (recovered address shown)") << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mode S / TCAS attack simulator"};
  app.require_subcommand(1);

  std::string file, log_path, metrics_path, snrs, out_path, hex, address;
  std::optional<std::uint64_t> seed;
  std::size_t corpus = tcasim::harness::kDefaultCorpusSize;
  bool defaults = false, as_json = false, uplink = false, downlink = false;
  std::vector<std::string> overrides;

  auto* sim_cmd = app.add_subcommand("simulate", "Run a scenario and emit its event log and metrics");
  sim_cmd->add_option("file", file, "Scenario document")->required();
  sim_cmd->add_option("--seed", seed, "Override the scenario seed");
  sim_cmd->add_option("--log", log_path, "Event log output ('-' for stdout)");
  sim_cmd->add_option("--metrics", metrics_path, "Metrics CSV output ('-' for stdout)");

  auto* sweep_cmd = app.add_subcommand("sweep", "Packet loss per SNR over a frame corpus");
  sweep_cmd->add_option("file", file, "Scenario document")->required();
  sweep_cmd->add_option("--snr", snrs, "Comma-separated SNR list in dB; 'inf' for no noise")->required();
  sweep_cmd->add_option("--corpus", corpus, "Frames per link")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--output", out_path, "CSV output (default stdout)");

  auto* fta_cmd = app.add_subcommand("fta", "Fault-tree risk report");
  fta_cmd->add_option("file", file, "Factor document");
  fta_cmd->add_flag("--defaults", defaults, "Use the built-in basic events and zero human factors");
  fta_cmd->add_option("--override", overrides, "key=value for a basic event (a..o) or human factor (VNA, VMIR, RNF, TNA, TI)");
  fta_cmd->add_flag("--json", as_json, "Emit JSON instead of CSV");
  fta_cmd->add_option("--output", out_path, "Output path (default stdout)");

  auto* codec_cmd = app.add_subcommand("codec", "Decode a frame and verify its parity");
  codec_cmd->add_option("hex", hex, "14 or 28 hex digits")->required();
  auto* up_flag = codec_cmd->add_flag("--uplink", uplink, "Treat as an interrogation");
  auto* down_flag = codec_cmd->add_flag("--downlink", downlink, "Treat as a reply (default)");
  up_flag->excludes(down_flag);
  codec_cmd->add_option("--address", address, "Expected address for address/parity formats");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kUsage;
  }

  try {
    if (*sim_cmd) return run_simulate(file, seed, log_path, metrics_path);
    if (*sweep_cmd) return run_sweep(file, snrs, corpus, out_path);
    if (*fta_cmd) return run_fta(file, defaults, overrides, as_json, out_path);
    if (*codec_cmd) return run_codec(hex, uplink, address);
  } catch (const tcasim::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == tcasim::ErrorCode::simulation_abort ? kAbort : kUsage;
  }
  return kUsage;
}
