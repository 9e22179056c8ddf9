#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

#include "riskprop/error.hpp"
#include "riskprop/rating.hpp"
#include "test_graphs.hpp"

using namespace riskprop;

namespace {

RiskReport report_of(std::vector<std::pair<Address, double>> risks) {
  RiskReport r;
  for (auto& [a, risk] : risks) {
    ReportRow row;
    row.address = a;
    row.risk = risk;
    row.reliability = 1.0 - risk / 10.0;
    r.rows.push_back(row);
  }
  return r;
}

}  // namespace

TEST(Risk, LinearMap) {
  EXPECT_NEAR(risk_from_reliability(0.1195), 8.805, 1e-12);
  EXPECT_EQ(risk_from_reliability(1.0), 0.0);
  EXPECT_EQ(risk_from_reliability(0.0), 10.0);
}

TEST(RiskOf, PayeeOnlyAccountsGetDefaultRisk) {
  // 0xa pays 0xb; 0xb pays 0xc; 0xc only receives.
  const auto g = PayerPayeeGraph::from_edges({{"0xa", "0xb", 1, 0.0}, {"0xb", "0xc", 1, 0.0}}, true);
  const auto result = iterate_until_convergence(g, {});
  const auto report = risk_of(result.state, g, {});
  ASSERT_EQ(report.rows.size(), 3u);
  for (const auto& row : report.rows) {
    if (row.address == "0xc") {
      EXPECT_TRUE(row.is_default);
      EXPECT_NEAR(row.risk, 3.0, 1e-12);
      EXPECT_EQ(row.reliability, 0.7);
      ASSERT_TRUE(row.trustiness);
    } else {
      EXPECT_FALSE(row.is_default);
      EXPECT_DOUBLE_EQ(row.risk, risk_from_reliability(row.reliability));
    }
  }
  const auto a = std::find_if(report.rows.begin(), report.rows.end(),
                              [](const ReportRow& r) { return r.address == "0xa"; });
  EXPECT_FALSE(a->trustiness);
  const auto b = std::find_if(report.rows.begin(), report.rows.end(),
                              [](const ReportRow& r) { return r.address == "0xb"; });
  EXPECT_TRUE(b->trustiness);  // both roles: payer R plus payee T
}

TEST(RiskOf, DefaultFollowsConfiguredInitialReliability) {
  const auto g = PayerPayeeGraph::from_edges({{"0xa", "0xb", 1, 0.0}}, true);
  PropagationConfig config;
  config.init_reliability = 0.4;
  const auto report = risk_of(iterate_until_convergence(g, config).state, g, config);
  EXPECT_NEAR(report.rows[0].address == "0xb" ? report.rows[0].risk : report.rows[1].risk, 6.0, 1e-12);
}

TEST(RiskOf, RowPerAccountAndOrderIsomorphism) {
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = testing_graphs::random_scored_graph(gen, 80, 0.9);
    const auto report = risk_of(iterate_until_convergence(g, {}).state, g, {});
    std::set<Address> accounts(g.payers().begin(), g.payers().end());
    accounts.insert(g.payees().begin(), g.payees().end());
    ASSERT_EQ(report.rows.size(), accounts.size());
    for (std::size_t i = 1; i < report.rows.size(); ++i) {
      ASSERT_GE(report.rows[i - 1].risk, report.rows[i].risk);
      ASSERT_LE(report.rows[i - 1].reliability, report.rows[i].reliability);
      if (report.rows[i - 1].risk == report.rows[i].risk)
        ASSERT_LT(report.rows[i - 1].address, report.rows[i].address);
    }
  }
}

TEST(Classify, ThresholdIsInclusive) {
  const auto r = classify(report_of({{"0x1", 8.805}, {"0x2", 0.474}, {"0x3", 6.0}}), 6.0);
  EXPECT_EQ(r.rows[0].predicted, Prediction::kIllicit);
  EXPECT_EQ(r.rows[1].predicted, Prediction::kLicit);
  EXPECT_EQ(r.rows[2].predicted, Prediction::kIllicit);
}

TEST(Classify, RejectsThresholdOutsideScale) {
  EXPECT_THROW(classify(report_of({{"0x1", 1.0}}), -0.1), Error);
  EXPECT_THROW(classify(report_of({{"0x1", 1.0}}), 10.5), Error);
}

TEST(Classify, MonotoneInThreshold) {
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> risk(0.0, 10.0);
  std::vector<std::pair<Address, double>> rows;
  for (unsigned i = 0; i < 200; ++i) rows.push_back({testing_graphs::account('a', i), risk(gen)});
  const auto base = report_of(rows);
  auto previous = classify(base, 0.0);
  for (double rth = 0.25; rth <= 10.0; rth += 0.25) {
    const auto next = classify(base, rth);
    for (std::size_t i = 0; i < base.rows.size(); ++i)
      if (previous.rows[i].predicted == Prediction::kLicit)
        ASSERT_EQ(next.rows[i].predicted, Prediction::kLicit);
    previous = next;
  }
}

TEST(ClassifyTopPercent, MarksCeilingOfShare) {
  std::vector<std::pair<Address, double>> rows;
  for (unsigned i = 0; i < 150; ++i) rows.push_back({testing_graphs::account('a', i), i / 15.0});
  const auto r = classify_top_percent(report_of(rows), 1.0);
  std::size_t illicit = 0;
  for (const auto& row : r.rows) illicit += row.predicted == Prediction::kIllicit;
  EXPECT_EQ(illicit, 2u);
  EXPECT_EQ(r.rows[0].predicted, Prediction::kIllicit);
  EXPECT_NEAR(r.rows[0].risk, 149 / 15.0, 1e-12);
}

TEST(TopK, TiesBreakByAddress) {
  const auto report = report_of({{"0xa", 9}, {"0xb", 5}, {"0xc", 9}});
  EXPECT_EQ(top_k(report, 2), (std::vector<Address>{"0xa", "0xc"}));
  EXPECT_EQ(top_k(report, 10), (std::vector<Address>{"0xa", "0xc", "0xb"}));
  EXPECT_EQ(top_k(report_of({{"0xa", 1}, {"0xb", 4}}), 1), (std::vector<Address>{"0xb"}));
  EXPECT_THROW(top_k(report, 0), Error);
}

TEST(ReportFile, FormatAndRoundTrip) {
  RiskReport report;
  report.rows.push_back({"0xa", 0.1195, std::nullopt, 8.805, false, Prediction::kIllicit});
  report.rows.push_back({"0xb", 0.7, -0.25, 3.0, true, Prediction::kLicit});
  std::stringstream s;
  write_report(s, report, {"epsilon=0.01"});
  EXPECT_EQ(s.str(),
            "# epsilon=0.01\n"
            "address,reliability,trustiness,risk,is_default,predicted\n"
            "0xa,0.119500,,8.805000,false,illicit\n"
            "0xb,0.700000,-0.250000,3.000000,true,licit\n");
  const auto back = read_report(s);
  ASSERT_EQ(back.rows.size(), 2u);
  EXPECT_EQ(back.rows[0].address, "0xa");
  EXPECT_FALSE(back.rows[0].trustiness);
  EXPECT_EQ(back.rows[0].predicted, Prediction::kIllicit);
  EXPECT_EQ(*back.rows[1].trustiness, -0.25);
  EXPECT_TRUE(back.rows[1].is_default);
}

TEST(ReportFile, BadHeaderIsRejected) {
  std::istringstream s("address,risk\n0xa,1\n");
  EXPECT_THROW(read_report(s), ParseError);
}
