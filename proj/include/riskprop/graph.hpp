#pragma once

// Directed bipartite payer/payee graph with per-edge de-anonymous scores.
//
// Every account that sends appears once among the payers, every account that
// receives appears once among the payees; an account doing both has one node
// on each side. Parallel transactions between the same pair collapse into one
// edge carrying their count as multiplicity.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "riskprop/ingest.hpp"

namespace riskprop {

using NodeIndex = std::uint32_t;
using EdgeIndex = std::uint32_t;

struct Edge {
  NodeIndex payer;
  NodeIndex payee;
  std::uint64_t multiplicity;
  double score;
};

struct EdgeSpec {
  Address payer;
  Address payee;
  std::uint64_t multiplicity = 1;
  double score = 0.0;
};

class PayerPayeeGraph {
public:
  // Builds the graph from aggregated edges. Duplicate (payer, payee) pairs are
  // merged by summing multiplicities. Scores are taken as given; the graph
  // counts as scored only when `scored` is true.
  static PayerPayeeGraph from_edges(std::vector<EdgeSpec> edges, bool scored = false);

  std::span<const Address> payers() const noexcept { return payers_; }
  std::span<const Address> payees() const noexcept { return payees_; }
  // Sorted by (payer address, payee address).
  std::span<const Edge> edges() const noexcept { return edges_; }

  // Out-edges of a payer are a contiguous block of edges(), in payee-address order.
  std::span<const Edge> out_edges(NodeIndex payer) const noexcept {
    return std::span<const Edge>(edges_).subspan(out_offsets_[payer],
                                                 out_offsets_[payer + 1] - out_offsets_[payer]);
  }
  // In-edge indices of a payee, in payer-address order.
  std::span<const EdgeIndex> in_edges(NodeIndex payee) const noexcept {
    return std::span<const EdgeIndex>(in_edge_ids_)
        .subspan(in_offsets_[payee], in_offsets_[payee + 1] - in_offsets_[payee]);
  }
  EdgeIndex first_out_edge(NodeIndex payer) const noexcept { return out_offsets_[payer]; }

  // Transactions sent by a payer / received by a payee.
  std::uint64_t out_count(NodeIndex payer) const noexcept { return out_count_[payer]; }
  std::uint64_t in_count(NodeIndex payee) const noexcept { return in_count_[payee]; }
  std::uint64_t max_out() const noexcept { return max_out_; }
  std::uint64_t max_in() const noexcept { return max_in_; }
  std::uint64_t transaction_count() const noexcept { return transactions_; }

  std::optional<NodeIndex> find_payer(const Address& a) const;
  std::optional<NodeIndex> find_payee(const Address& a) const;

  bool scored() const noexcept { return scored_; }
  // Largest edge score (M) and largest absolute edge score.
  double max_score() const noexcept { return max_score_; }
  double max_abs_score() const noexcept { return max_abs_score_; }
  // Set when some |score| == 1; the propagation contraction bound is void then.
  bool saturated() const noexcept { return saturated_; }
  // Contraction factor (1 + max|score|) / 2 of the propagation iteration.
  double contraction_factor() const noexcept { return (1.0 + max_abs_score_) / 2.0; }

  // Copy with replaced scores, one per edge in edges() order. Throws if the
  // count differs or a score falls outside [-1, 1].
  PayerPayeeGraph with_scores(std::vector<double> scores) const;

private:
  void refresh_score_summary();

  std::vector<Address> payers_;
  std::vector<Address> payees_;
  std::vector<Edge> edges_;
  std::vector<EdgeIndex> out_offsets_;
  std::vector<EdgeIndex> in_offsets_;
  std::vector<EdgeIndex> in_edge_ids_;
  std::vector<std::uint64_t> out_count_;
  std::vector<std::uint64_t> in_count_;
  std::uint64_t max_out_ = 0;
  std::uint64_t max_in_ = 0;
  std::uint64_t transactions_ = 0;
  bool scored_ = false;
  double max_score_ = 0.0;
  double max_abs_score_ = 0.0;
  bool saturated_ = false;
};

// Collapses parallel transactions into multiplicity-weighted edges. Scores are
// left unset. Throws Error on empty input.
PayerPayeeGraph build_graph(const std::vector<TransactionRecord>& records);

// De-anonymous score of one transaction:
//   ½[(2·ln out − ln maxOut)/ln maxOut + (2·ln in − ln maxIn)/ln maxIn]
// A side whose maximum is 1 contributes 0. Throws Error unless
// 1 ≤ out ≤ maxOut and 1 ≤ in ≤ maxIn.
double deanonymous_score(std::uint64_t out_count, std::uint64_t in_count, std::uint64_t max_out,
                         std::uint64_t max_in);

PayerPayeeGraph score_all_edges(PayerPayeeGraph graph, unsigned threads = 1);

// `payer,payee,multiplicity,score` per edge, scores at 17 significant digits.
void write_graph_dump(std::ostream& out, const PayerPayeeGraph& graph);
PayerPayeeGraph read_graph_dump(std::istream& in);

}  // namespace riskprop
