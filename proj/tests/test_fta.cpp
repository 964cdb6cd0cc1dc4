#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "tcasim/harness/fta_report.hpp"

using namespace tcasim;
using namespace tcasim::fta;

namespace {

constexpr double kTol = 1e-12;

HumanFactors hf(double vna, double vmir, double rnf, double tna, double ti) { return {vna, vmir, rnf, tna, ti}; }

// Component expressions written out independently of the library.
double pu(const HumanFactors& h) { return 0.413 + 0.259 * (h.vna + h.tna) + 0.327 * h.rnf + 0.0008 * h.vmir; }
double pi(const HumanFactors& h) { return 0.11 + 0.014 * h.vmir + 0.59 * h.ti; }

}  // namespace

TEST(TopEvent, AllZeroConstants) {
  auto r = top_event({});
  EXPECT_NEAR(r.p_unresolved, 0.413, kTol);
  EXPECT_NEAR(r.p_induced, 0.11, kTol);
  EXPECT_NEAR(r.p_top_sum, 0.523, kTol);
  EXPECT_NEAR(r.p_top_published, 0.424, kTol);
  EXPECT_NEAR(r.p_top_sum - r.p_top_published, 0.099, kTol);
  EXPECT_TRUE(r.flags.empty());
}

TEST(TopEvent, WorkedExamples) {
  EXPECT_NEAR(unresolved_component(hf(1, 1, 1, 1, 0)), 1.2588, kTol);
  EXPECT_NEAR(unresolved_component(hf(0.5, 0, 0, 0, 0)), 0.5425, kTol);
  EXPECT_NEAR(induced_component(hf(0, 1, 0, 0, 1)), 0.714, kTol);
  EXPECT_NEAR(induced_component(hf(0, 0, 0, 0, 0.5)), 0.405, kTol);
}

TEST(TopEvent, OutOfRangeFactorsRejected) {
  EXPECT_THROW(unresolved_component(hf(1.5, 0, 0, 0, 0)), Error);
  EXPECT_THROW(induced_component(hf(0, -0.1, 0, 0, 0)), Error);
}

TEST(TopEvent, ExceedingOneIsFlaggedNotClamped) {
  auto r = top_event(hf(1, 1, 1, 1, 0));
  EXPECT_NEAR(r.p_unresolved, 1.2588, kTol);
  ASSERT_EQ(r.flags.size(), 1u);
  EXPECT_EQ(r.flags[0], "exceeds_probability");
}

TEST(TopEventProperty, MatchesIndependentFormulaWithConstantGap) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 10000; ++i) {
    auto h = hf(u(rng), u(rng), u(rng), u(rng), u(rng));
    auto r = top_event(h);
    ASSERT_NEAR(r.p_unresolved, pu(h), kTol);
    ASSERT_NEAR(r.p_induced, pi(h), kTol);
    ASSERT_NEAR(r.p_top_sum, r.p_unresolved + r.p_induced, kTol);
    ASSERT_NEAR(r.p_top_sum - r.p_top_published, 0.099, kTol);
    ASSERT_EQ(r.flags.empty(), r.p_unresolved <= 1 && r.p_induced <= 1 && r.p_top_sum <= 1);
  }
}

TEST(TopEventProperty, MonotoneInEveryFactor) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0, 0.9);
  for (int i = 0; i < 2000; ++i) {
    auto h = hf(u(rng), u(rng), u(rng), u(rng), u(rng));
    const double base = top_event(h).p_top_sum;
    for (std::size_t k = 0; k < 5; ++k) {
      auto g = h;
      g[k] += 0.1;
      ASSERT_GE(top_event(g).p_top_sum, base);
    }
  }
}

TEST(RiskRatio, ExamplesAndUndefined) {
  EXPECT_NEAR(risk_ratio(0.5, 0.25), 2.0, kTol);
  EXPECT_NEAR(top_event({}, 1.0).risk_ratio, 0.523, kTol);
  EXPECT_NEAR(top_event({}, 0.523).risk_ratio, 1.0, kTol);
  try {
    risk_ratio(0.5, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::undefined);
  }
  EXPECT_THROW(risk_ratio(-0.1, 1), Error);
}

TEST(Sweep, EmptyGridGivesBaseRow) {
  auto rows = sensitivity_sweep({}, {}, {});
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_NEAR(rows[0].report.p_top_sum, 0.523, kTol);
  EXPECT_TRUE(rows[0].report.flags.empty());
}

TEST(Sweep, AttackOverridesRaiseRiskAndAreFlagged) {
  HumanFactors h = hf(0.2, 0.1, 0.1, 0.2, 0.1);
  auto base = sensitivity_sweep({}, h, {});
  auto atk = sensitivity_sweep({}, h, {}, phantom_attack_overrides());
  ASSERT_EQ(atk.size(), 1u);
  EXPECT_GT(atk[0].report.p_top_sum, base[0].report.p_top_sum);
  EXPECT_NEAR(atk[0].factors.vna, 1.0, kTol);
  EXPECT_NEAR(atk[0].factors.tna, 1.0, kTol);
  const auto& f = atk[0].report.flags;
  EXPECT_NE(std::find(f.begin(), f.end(), "visual_acquisition_mapping"), f.end());
}

TEST(Sweep, GridCrossProductOrderAndMonotonicity) {
  FactorGrid g;
  const std::vector<double> axis{0, 0.25, 0.5, 0.75, 1};
  g.axes["VNA"] = axis;
  g.axes["TI"] = axis;
  auto rows = sensitivity_sweep({}, {}, g);
  ASSERT_EQ(rows.size(), 25u);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 5; ++j) {
      const auto& r = rows[i * 5 + j];
      EXPECT_EQ(r.factors.vna, axis[i]);
      EXPECT_EQ(r.factors.ti, axis[j]);
      if (j) { EXPECT_GT(r.report.p_top_sum, rows[i * 5 + j - 1].report.p_top_sum); }
      if (i) { EXPECT_GT(r.report.p_top_sum, rows[(i - 1) * 5 + j].report.p_top_sum); }
    }
  g.axes["RNF"] = {};
  EXPECT_THROW(sensitivity_sweep({}, {}, g), Error);
  g.axes.erase("RNF");
  g.axes["XYZ"] = {0};
  EXPECT_THROW(sensitivity_sweep({}, {}, g), Error);
}

TEST(Sweep, CsvHeaderAndRow) {
  std::ostringstream out;
  write_sweep_csv(out, sensitivity_sweep({}, {}, {}));
  EXPECT_EQ(out.str(), std::string(kSweepHeader) + "\n0,0,0,0,0,0.413,0.11,0.523,0.424,0.523,\n");
}

TEST(BasicEvents, SetAndValidate) {
  BasicEvents e;
  EXPECT_NEAR(e.n(), 0.17, kTol);
  e.set('n', 1);
  EXPECT_EQ(e.n(), 1.0);
  EXPECT_THROW(e.set('p', 0.1), Error);
  EXPECT_THROW(e.set('a', 1.1), Error);
}

TEST(FtaDocument, ParsesEveryKey) {
  auto j = nlohmann::json::parse(R"({"schema_version":1,"scenario":"phantom_attack","basic_events":{"a":0.2},
      "overrides":{"RNF":0.3},"human_factors":{"TI":0.1},"grid":{"VMIR":[0,1]},"p_without":0.5})");
  auto d = harness::parse_fta_document(j);
  EXPECT_EQ(d.scenario, "phantom_attack");
  EXPECT_EQ(d.overrides.at('n'), 1.0);
  EXPECT_EQ(d.events.get('a'), 0.2);
  EXPECT_EQ(d.factors.rnf, 0.3);
  EXPECT_EQ(d.factors.ti, 0.1);
  auto rows = harness::fta_report(d);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_NEAR(rows[0].report.risk_ratio, rows[0].report.p_top_sum / 0.5, kTol);
  auto js = harness::fta_rows_json(rows);
  EXPECT_EQ(js.size(), 2u);
  EXPECT_EQ(js[1]["factors"]["VMIR"], 1.0);
}

TEST(FtaDocument, RejectsBadInput) {
  auto bad = [](const char* text) {
    try {
      harness::parse_fta_document(nlohmann::json::parse(text));
    } catch (const Error& e) {
      return e.code() == ErrorCode::load ? std::string(e.what()) : std::string("wrong code");
    }
    return std::string("accepted");
  };
  EXPECT_NE(bad(R"({"bogus":1})").find("bogus"), std::string::npos);
  EXPECT_NE(bad(R"({"schema_version":2})").find("schema_version"), std::string::npos);
  EXPECT_NE(bad(R"({"scenario":"other"})").find("scenario"), std::string::npos);
  EXPECT_NE(bad(R"({"basic_events":{"z":0.1}})").find("basic_events.z"), std::string::npos);
  EXPECT_NE(bad(R"({"human_factors":{"FOO":0.1}})").find("human_factors.FOO"), std::string::npos);
  EXPECT_NE(bad(R"({"grid":{"TI":"x"}})").find("grid.TI"), std::string::npos);
  EXPECT_NE(bad(R"({"overrides":{"a":2}})").find("overrides.a"), std::string::npos);
  EXPECT_NE(bad("[]"), "accepted");
  EXPECT_THROW(harness::load_fta_file("/nonexistent/fta.json"), Error);
}

TEST(FtaDocument, OverrideKeys) {
  harness::FtaDocument d;
  harness::apply_override(d, "VNA", 0.5);
  harness::apply_override(d, "o", 1);
  EXPECT_EQ(d.factors.vna, 0.5);
  EXPECT_EQ(d.overrides.at('o'), 1.0);
  EXPECT_THROW(harness::apply_override(d, "VNA", 2), Error);
  EXPECT_THROW(harness::apply_override(d, "q", 0.1), Error);
}
