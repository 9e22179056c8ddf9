#include "riskprop/rating.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <string_view>

#include "riskprop/error.hpp"

namespace riskprop {
namespace {

void sort_rows(std::vector<ReportRow>& rows) {
  std::sort(rows.begin(), rows.end(), [](const ReportRow& a, const ReportRow& b) {
    if (a.risk != b.risk) return a.risk > b.risk;
    return a.address < b.address;
  });
}

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

double parse_real(std::string_view s, std::size_t line_no) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw ParseError("unparseable number '" + std::string(s) + "'", line_no);
  return v;
}

}  // namespace

RiskReport risk_of(const PropagationState& state, const PayerPayeeGraph& graph,
                   const PropagationConfig& config) {
  std::map<Address, ReportRow> rows;
  const auto payers = graph.payers();
  for (std::size_t u = 0; u < payers.size(); ++u) {
    ReportRow row;
    row.address = payers[u];
    row.reliability = state.reliability[u];
    row.risk = risk_from_reliability(row.reliability);
    rows.emplace(row.address, std::move(row));
  }
  const auto payees = graph.payees();
  for (std::size_t v = 0; v < payees.size(); ++v) {
    auto [it, inserted] = rows.try_emplace(payees[v]);
    auto& row = it->second;
    if (inserted) {
      row.address = payees[v];
      row.reliability = config.init_reliability;
      row.risk = risk_from_reliability(config.init_reliability);
      row.is_default = true;
    }
    row.trustiness = state.trustiness[v];
  }

  RiskReport report;
  report.rows.reserve(rows.size());
  for (auto& [address, row] : rows) report.rows.push_back(std::move(row));
  sort_rows(report.rows);
  return report;
}

RiskReport classify(RiskReport report, double rth) {
  if (!(rth >= 0.0 && rth <= 10.0)) throw Error("risk threshold must lie in [0, 10]");
  for (auto& row : report.rows)
    row.predicted = row.risk >= rth ? Prediction::kIllicit : Prediction::kLicit;
  return report;
}

RiskReport classify_top_percent(RiskReport report, double percent) {
  if (!(percent >= 0.0 && percent <= 100.0)) throw Error("top percent must lie in [0, 100]");
  sort_rows(report.rows);
  const auto n = report.rows.size();
  const auto cut = std::min(n, static_cast<std::size_t>(std::ceil(static_cast<double>(n) * percent / 100.0)));
  for (std::size_t i = 0; i < n; ++i)
    report.rows[i].predicted = i < cut ? Prediction::kIllicit : Prediction::kLicit;
  return report;
}

std::vector<Address> top_k(const RiskReport& report, std::size_t k) {
  if (k == 0) throw Error("k must be positive");
  std::vector<const ReportRow*> order;
  order.reserve(report.rows.size());
  for (const auto& row : report.rows) order.push_back(&row);
  std::stable_sort(order.begin(), order.end(), [](const ReportRow* a, const ReportRow* b) {
    if (a->risk != b->risk) return a->risk > b->risk;
    return a->address < b->address;
  });
  std::vector<Address> out;
  for (std::size_t i = 0; i < std::min(k, order.size()); ++i) out.push_back(order[i]->address);
  return out;
}

void write_report(std::ostream& out, const RiskReport& report,
                  const std::vector<std::string>& comments) {
  for (const auto& c : comments) out << "# " << c << '\n';
  out << "address,reliability,trustiness,risk,is_default,predicted\n";
  for (const auto& row : report.rows) {
    out << row.address << ',' << fixed6(row.reliability) << ',';
    if (row.trustiness) out << fixed6(*row.trustiness);
    out << ',' << fixed6(row.risk) << ',' << (row.is_default ? "true" : "false") << ','
        << (row.predicted == Prediction::kIllicit ? "illicit" : "licit") << '\n';
  }
}

RiskReport read_report(std::istream& in) {
  RiskReport report;
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line != "address,reliability,trustiness,risk,is_default,predicted")
        throw ParseError("unexpected report header", line_no);
      header = true;
      continue;
    }
    std::vector<std::string_view> f;
    std::string_view rest(line);
    for (;;) {
      const auto pos = rest.find(',');
      f.push_back(rest.substr(0, pos));
      if (pos == std::string_view::npos) break;
      rest.remove_prefix(pos + 1);
    }
    if (f.size() != 6) throw ParseError("expected 6 fields", line_no);
    ReportRow row;
    const auto address = normalize_address(f[0]);
    if (!address) throw ParseError("malformed address", line_no);
    row.address = *address;
    row.reliability = parse_real(f[1], line_no);
    if (!f[2].empty()) row.trustiness = parse_real(f[2], line_no);
    row.risk = parse_real(f[3], line_no);
    if (f[4] != "true" && f[4] != "false") throw ParseError("is_default must be true or false", line_no);
    row.is_default = f[4] == "true";
    if (f[5] != "illicit" && f[5] != "licit") throw ParseError("predicted must be illicit or licit", line_no);
    row.predicted = f[5] == "illicit" ? Prediction::kIllicit : Prediction::kLicit;
    report.rows.push_back(std::move(row));
  }
  if (!header) throw ParseError("report has no header row", 0);
  return report;
}

}  // namespace riskprop
