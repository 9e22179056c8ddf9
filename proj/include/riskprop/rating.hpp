#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "riskprop/graph.hpp"
#include "riskprop/propagation.hpp"

namespace riskprop {

enum class Prediction { kLicit, kIllicit };

struct ReportRow {
  Address address;
  double reliability = 0.0;
  std::optional<double> trustiness;  // absent for accounts that never receive
  double risk = 0.0;                 // (1 − reliability)·10
  bool is_default = false;           // no outgoing transactions
  Prediction predicted = Prediction::kLicit;
};

// One row per account, sorted by risk descending then address ascending.
struct RiskReport {
  std::vector<ReportRow> rows;
};

inline double risk_from_reliability(double reliability) { return (1.0 - reliability) * 10.0; }

// Accounts that only receive get the default reliability config.init_reliability.
RiskReport risk_of(const PropagationState& state, const PayerPayeeGraph& graph,
                   const PropagationConfig& config);

// Predicts illicit iff risk ≥ rth. Throws Error unless 0 ≤ rth ≤ 10.
RiskReport classify(RiskReport report, double rth);

// Predicts illicit for the ceil(n·percent/100) highest-risk rows.
RiskReport classify_top_percent(RiskReport report, double percent);

// The first min(k, n) addresses in report order. Throws Error if k == 0.
std::vector<Address> top_k(const RiskReport& report, std::size_t k);

// Header `address,reliability,trustiness,risk,is_default,predicted`, reals
// at 6 decimals, optional leading `# ` comment lines.
void write_report(std::ostream& out, const RiskReport& report,
                  const std::vector<std::string>& comments = {});
RiskReport read_report(std::istream& in);

}  // namespace riskprop
