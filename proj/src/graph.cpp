#include "riskprop/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <string_view>

#include "riskprop/error.hpp"
#include "riskprop/parallel.hpp"

namespace riskprop {
namespace {

std::optional<NodeIndex> lookup(const std::vector<Address>& sorted, const Address& a) {
  const auto it = std::lower_bound(sorted.begin(), sorted.end(), a);
  if (it == sorted.end() || *it != a) return std::nullopt;
  return static_cast<NodeIndex>(it - sorted.begin());
}

std::vector<Address> sorted_unique(std::vector<Address> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

// One side of the score: 2·ln(count)/ln(max) − 1 written as in the definition.
double side_term(std::uint64_t count, std::uint64_t max) {
  if (max == 1) return 0.0;
  const double log_max = std::log(static_cast<double>(max));
  return (2.0 * std::log(static_cast<double>(count)) - log_max) / log_max;
}

}  // namespace

PayerPayeeGraph PayerPayeeGraph::from_edges(std::vector<EdgeSpec> specs, bool scored) {
  if (specs.empty()) throw Error("cannot build a graph without edges");
  if (specs.size() >= std::numeric_limits<EdgeIndex>::max())
    throw Error("edge count exceeds index range");

  std::sort(specs.begin(), specs.end(), [](const EdgeSpec& a, const EdgeSpec& b) {
    return std::tie(a.payer, a.payee) < std::tie(b.payer, b.payee);
  });

  PayerPayeeGraph g;
  {
    std::vector<Address> payers, payees;
    payers.reserve(specs.size());
    payees.reserve(specs.size());
    for (const auto& s : specs) {
      payers.push_back(s.payer);
      payees.push_back(s.payee);
    }
    g.payers_ = sorted_unique(std::move(payers));
    g.payees_ = sorted_unique(std::move(payees));
  }
  g.out_count_.assign(g.payers_.size(), 0);
  g.in_count_.assign(g.payees_.size(), 0);
  g.out_offsets_.assign(g.payers_.size() + 1, 0);
  g.in_offsets_.assign(g.payees_.size() + 1, 0);

  g.edges_.reserve(specs.size());
  NodeIndex payer = 0;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto& s = specs[i];
    if (s.multiplicity == 0) throw Error("edge " + s.payer + "->" + s.payee + " has zero multiplicity");
    while (g.payers_[payer] != s.payer) ++payer;
    if (!g.edges_.empty() && i > 0 && specs[i - 1].payer == s.payer &&
        specs[i - 1].payee == s.payee) {
      g.edges_.back().multiplicity += s.multiplicity;
    } else {
      g.edges_.push_back({payer, *lookup(g.payees_, s.payee), s.multiplicity, s.score});
    }
  }

  for (const auto& e : g.edges_) {
    g.out_count_[e.payer] += e.multiplicity;
    g.in_count_[e.payee] += e.multiplicity;
    ++g.out_offsets_[e.payer + 1];
    ++g.in_offsets_[e.payee + 1];
    g.transactions_ += e.multiplicity;
  }
  for (std::size_t i = 1; i < g.out_offsets_.size(); ++i) g.out_offsets_[i] += g.out_offsets_[i - 1];
  for (std::size_t i = 1; i < g.in_offsets_.size(); ++i) g.in_offsets_[i] += g.in_offsets_[i - 1];

  // Edges are in payer-address order, so filling in-lists in edge order
  // leaves each payee's list sorted by payer address.
  g.in_edge_ids_.resize(g.edges_.size());
  std::vector<EdgeIndex> cursor(g.in_offsets_.begin(), g.in_offsets_.end() - 1);
  for (EdgeIndex e = 0; e < g.edges_.size(); ++e) g.in_edge_ids_[cursor[g.edges_[e].payee]++] = e;

  g.max_out_ = *std::max_element(g.out_count_.begin(), g.out_count_.end());
  g.max_in_ = *std::max_element(g.in_count_.begin(), g.in_count_.end());
  g.scored_ = scored;
  if (scored) g.refresh_score_summary();
  return g;
}

std::optional<NodeIndex> PayerPayeeGraph::find_payer(const Address& a) const {
  return lookup(payers_, a);
}

std::optional<NodeIndex> PayerPayeeGraph::find_payee(const Address& a) const {
  return lookup(payees_, a);
}

void PayerPayeeGraph::refresh_score_summary() {
  max_score_ = -std::numeric_limits<double>::infinity();
  max_abs_score_ = 0.0;
  saturated_ = false;
  for (const auto& e : edges_) {
    if (!(e.score >= -1.0 && e.score <= 1.0))
      throw Error("edge score " + std::to_string(e.score) + " outside [-1, 1]");
    max_score_ = std::max(max_score_, e.score);
    max_abs_score_ = std::max(max_abs_score_, std::abs(e.score));
    if (std::abs(e.score) == 1.0) saturated_ = true;
  }
}

PayerPayeeGraph PayerPayeeGraph::with_scores(std::vector<double> scores) const {
  if (scores.size() != edges_.size())
    throw Error("expected " + std::to_string(edges_.size()) + " scores, got " +
                std::to_string(scores.size()));
  PayerPayeeGraph g = *this;
  for (std::size_t i = 0; i < scores.size(); ++i) g.edges_[i].score = scores[i];
  g.scored_ = true;
  g.refresh_score_summary();
  return g;
}

PayerPayeeGraph build_graph(const std::vector<TransactionRecord>& records) {
  if (records.empty()) throw Error("cannot build a graph from zero transactions");
  std::vector<EdgeSpec> specs;
  specs.reserve(records.size());
  for (const auto& r : records) specs.push_back({r.payer, r.payee, 1, 0.0});
  return PayerPayeeGraph::from_edges(std::move(specs));
}

double deanonymous_score(std::uint64_t out_count, std::uint64_t in_count, std::uint64_t max_out,
                         std::uint64_t max_in) {
  if (out_count < 1 || out_count > max_out || in_count < 1 || in_count > max_in)
    throw Error("transaction counts out of range: out=" + std::to_string(out_count) + "/" +
                std::to_string(max_out) + " in=" + std::to_string(in_count) + "/" +
                std::to_string(max_in));
  return 0.5 * (side_term(out_count, max_out) + side_term(in_count, max_in));
}

PayerPayeeGraph score_all_edges(PayerPayeeGraph graph, unsigned threads) {
  const auto edges = graph.edges();
  std::vector<double> scores(edges.size());
  parallel_for(edges.size(), threads, [&](std::size_t i) {
    const auto& e = edges[i];
    scores[i] = deanonymous_score(graph.out_count(e.payer), graph.in_count(e.payee),
                                  graph.max_out(), graph.max_in());
  });
  return graph.with_scores(std::move(scores));
}

void write_graph_dump(std::ostream& out, const PayerPayeeGraph& graph) {
  out << "payer,payee,multiplicity,score\n";
  char buf[32];
  for (const auto& e : graph.edges()) {
    std::snprintf(buf, sizeof buf, "%.17g", e.score);
    out << graph.payers()[e.payer] << ',' << graph.payees()[e.payee] << ',' << e.multiplicity
        << ',' << buf << '\n';
  }
}

PayerPayeeGraph read_graph_dump(std::istream& in) {
  std::vector<EdgeSpec> specs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#' || line.rfind("payer,", 0) == 0) continue;
    std::string_view rest(line);
    std::string_view fields[4];
    for (int f = 0; f < 4; ++f) {
      const auto pos = f < 3 ? rest.find(',') : std::string_view::npos;
      if (f < 3 && pos == std::string_view::npos) throw ParseError("expected 4 fields", line_no);
      fields[f] = rest.substr(0, pos);
      if (f < 3) rest.remove_prefix(pos + 1);
    }
    if (!fields[3].empty() && fields[3].back() == '\r') fields[3].remove_suffix(1);
    auto payer = normalize_address(fields[0]);
    auto payee = normalize_address(fields[1]);
    if (!payer || !payee) throw ParseError("malformed address", line_no);
    EdgeSpec spec{std::move(*payer), std::move(*payee), 0, 0.0};
    auto r1 = std::from_chars(fields[2].data(), fields[2].data() + fields[2].size(), spec.multiplicity);
    auto r2 = std::from_chars(fields[3].data(), fields[3].data() + fields[3].size(), spec.score);
    if (r1.ec != std::errc{} || r2.ec != std::errc{} || r1.ptr != fields[2].data() + fields[2].size() ||
        r2.ptr != fields[3].data() + fields[3].size())
      throw ParseError("unparseable multiplicity or score", line_no);
    specs.push_back(std::move(spec));
  }
  return PayerPayeeGraph::from_edges(std::move(specs), true);
}

}  // namespace riskprop
