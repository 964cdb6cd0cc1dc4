#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "tcasim/harness/sweep.hpp"

using namespace tcasim;
using namespace tcasim::harness;

namespace {

std::string path(const std::string& name) { return std::string(TCASIM_SCENARIO_DIR) + "/" + name + ".json"; }

std::string load_error(const std::string& text) {
  try {
    load_scenario_text(text);
  } catch (const Error& e) {
    return e.code() == ErrorCode::load ? e.what() : "wrong code";
  }
  return "accepted";
}

const char* kMinimal = R"({"duration_s":10,"aircraft":[{"icao":"abcdef","altitude_ft":1000}]})";

std::string metrics_csv(const MetricsReport& m) {
  std::ostringstream out;
  write_metrics_csv(out, m);
  return out.str();
}

std::string log_text(const sim::EventLog& log) {
  std::ostringstream out;
  sim::write_event_log(out, log);
  return out.str();
}

}  // namespace

TEST(Load, HeadOnScenarioFields) {
  auto s = load_scenario_file(path("head_on_phantom"));
  ASSERT_EQ(s.aircraft.size(), 2u);
  const auto& a = s.aircraft[0].state.velocity;
  const auto& b = s.aircraft[1].state.velocity;
  const double diff = std::fabs(std::atan2(a.vy_kt, a.vx_kt) - std::atan2(b.vy_kt, b.vx_kt));
  EXPECT_NEAR(diff, M_PI, 1e-12);
  EXPECT_EQ(a.vertical_rate_fpm, 0.0);
  EXPECT_EQ(s.attacker.kind, AttackKind::phantom);
  EXPECT_EQ(s.expected_rounds(), 150);
  EXPECT_EQ(s.success.predicate, Predicate::nmac);
}

TEST(Load, BenignPairExpectsSixHundredRounds) {
  auto s = load_scenario_file(path("benign_pair"));
  EXPECT_EQ(s.expected_rounds(), 600);
  EXPECT_EQ(s.attacker.kind, AttackKind::none);
}

TEST(Load, EveryBundledScenarioParses) {
  for (const char* n : {"head_on_phantom", "squitter_flood", "all_call_flood", "benign_pair", "ranging_static", "phantom_closing",
                        "noisy_pair"})
    EXPECT_NO_THROW(load_scenario_file(path(n))) << n;
}

TEST(Load, ErrorsNameTheField) {
  EXPECT_NE(load_error("{}").find("aircraft"), std::string::npos);
  EXPECT_NE(load_error("not json").find("malformed"), std::string::npos);
  EXPECT_EQ(load_error(kMinimal), "accepted");
  EXPECT_NE(load_error(R"({"duration_s":10,"aircraft":[{"icao":"abcdef","altitude_ft":1000,"wings":2}]})").find("aircraft[0].wings"),
            std::string::npos);
  EXPECT_NE(load_error(R"({"duration_s":10,"channel":{"model":"awgn"},"aircraft":[{"icao":"abcdef","altitude_ft":1000}]})").find("seed"),
            std::string::npos);
  EXPECT_NE(load_error(R"({"duration_s":10,"aircraft":[{"icao":"abcdef","altitude_ft":1},{"icao":"ABCDEF","altitude_ft":2}]})")
                .find("duplicate"),
            std::string::npos);
  EXPECT_NE(load_error(R"({"duration_s":10,"aircraft":[{"icao":"xyz","altitude_ft":1}]})").find("aircraft[0].icao"), std::string::npos);
  EXPECT_NE(load_error(R"({"schema_version":2,"duration_s":10,"aircraft":[{"icao":"abcdef","altitude_ft":1}]})").find("schema_version"),
            std::string::npos);
  EXPECT_NE(load_error(R"({"duration_s":10,"aircraft":[{"icao":"abcdef","altitude_ft":1}],"attacker":{"kind":"phantom"}})")
                .find("attacker.plan"),
            std::string::npos);
  EXPECT_THROW(load_scenario_file("/nonexistent.json"), Error);
}

TEST(Simulate, MetricsRecomputeFromSerializedLog) {
  auto r = simulate(load_scenario_file(path("head_on_phantom")));
  std::istringstream in(log_text(r.log));
  auto back = sim::read_event_log(in);
  EXPECT_EQ(back, r.log);
  EXPECT_EQ(metrics_csv(compute_metrics(back)), metrics_csv(r.metrics));
}

TEST(Simulate, DeterministicBytes) {
  auto s = load_scenario_file(path("noisy_pair"));
  s.duration_s = 60;
  s.channel.snr_db = 6;
  auto a = simulate(s), b = simulate(s);
  EXPECT_EQ(log_text(a.log), log_text(b.log));
  EXPECT_EQ(metrics_csv(a.metrics), metrics_csv(b.metrics));
  auto c = simulate(s, 7);
  EXPECT_NE(log_text(a.log), log_text(c.log));
}

TEST(Simulate, PredicatesOnBundledScenarios) {
  for (const char* n : {"benign_pair", "all_call_flood", "squitter_flood", "head_on_phantom"}) {
    auto r = simulate(load_scenario_file(path(n)));
    EXPECT_TRUE(r.success.holds) << n << ": " << r.success.detail;
    EXPECT_FALSE(r.aborted);
  }
}

TEST(Predicates, EvaluateOnSyntheticMetrics) {
  MetricsReport m;
  SuccessSpec s;
  EXPECT_TRUE(evaluate_success(s, m).holds);
  s.predicate = Predicate::nmac;
  EXPECT_FALSE(evaluate_success(s, m).holds);
  m.nmacs.push_back({5, "nmac", "aaaaaa", "bbbbbb", "", "nmac"});
  EXPECT_TRUE(evaluate_success(s, m).holds);
  s.between = {modes::IcaoAddress(0xaaaaaa), modes::IcaoAddress(0xcccccc)};
  EXPECT_FALSE(evaluate_success(s, m).holds);

  s = {};
  s.predicate = Predicate::track_kept;
  s.observer = modes::IcaoAddress(0xaaaaaa);
  s.target = modes::IcaoAddress(0xbbbbbb);
  EXPECT_FALSE(evaluate_success(s, m).holds);
  m.track_events.push_back({1, "track", "aaaaaa", "bbbbbb", "", "acquire"});
  EXPECT_TRUE(evaluate_success(s, m).holds);
  m.track_events.push_back({2, "track", "aaaaaa", "bbbbbb", "", "evict"});
  EXPECT_FALSE(evaluate_success(s, m).holds);
  s.predicate = Predicate::track_lost;
  EXPECT_TRUE(evaluate_success(s, m).holds);

  s = {};
  s.predicate = Predicate::replies_delivered;
  s.count = 3;
  m.replies_received["attacker"] = 3;
  EXPECT_TRUE(evaluate_success(s, m).holds);
  s.count = 4;
  EXPECT_FALSE(evaluate_success(s, m).holds);

  s = {};
  s.predicate = Predicate::no_advisories;
  EXPECT_TRUE(evaluate_success(s, m).holds);
  m.advisories.push_back({3, "advisory", "aaaaaa", "bbbbbb", "", "ta"});
  EXPECT_FALSE(evaluate_success(s, m).holds);
}

TEST(Metrics, PacketLossUndefinedWithoutTraffic) {
  EXPECT_FALSE(LinkCounts{}.packet_loss().has_value());
  EXPECT_DOUBLE_EQ(*(LinkCounts{4, 3}.packet_loss()), 0.25);
}

class LossSweep : public ::testing::Test {
 protected:
  static void SetUpTestSuite() { corpus_ = new FrameCorpus(collect_corpus(load_scenario_file(path("benign_pair")))); }
  static void TearDownTestSuite() { delete corpus_; }
  static FrameCorpus* corpus_;
};

FrameCorpus* LossSweep::corpus_ = nullptr;

TEST_F(LossSweep, CorpusHasSixHundredFramesPerLink) {
  EXPECT_EQ(corpus_->uplink.size(), 600u);
  EXPECT_EQ(corpus_->downlink.size(), 600u);
}

TEST_F(LossSweep, RowsOrderedAndMonotone) {
  auto rows = loss_sweep(*corpus_, {25, 0, 10, 5, 15, 20}, 1);
  ASSERT_EQ(rows.size(), 12u);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].sent, 600u);
    EXPECT_EQ(rows[i].link, i % 2 ? "downlink" : "uplink");
    if (i >= 2) {
      EXPECT_GE(rows[i].snr_db, rows[i - 2].snr_db);
      EXPECT_LE(*rows[i].packet_loss(), *rows[i - 2].packet_loss()) << rows[i].snr_db << " " << rows[i].link;
    }
  }
  EXPECT_LT(*rows[10].packet_loss(), 0.01);
  EXPECT_LT(*rows[11].packet_loss(), 0.01);
  EXPECT_GT(*rows[0].packet_loss(), 0.5);
}

TEST_F(LossSweep, NoiselessRowLosesNothing) {
  auto rows = loss_sweep(*corpus_, {INFINITY}, 3);
  for (const auto& r : rows) EXPECT_EQ(*r.packet_loss(), 0.0);
  std::ostringstream out;
  write_loss_csv(out, rows);
  EXPECT_EQ(out.str(), "snr_db,link,sent,received_valid,packet_loss\ninf,uplink,600,600,0.000000\ninf,downlink,600,600,0.000000\n");
}
