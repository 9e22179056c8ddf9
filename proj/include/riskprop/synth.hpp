#pragma once

// Synthetic transaction corpora: uniform random payer/payee networks for
// scalability runs, and planted risky-account motifs with labels for
// evaluation fixtures.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "riskprop/ingest.hpp"
#include "riskprop/propagation.hpp"

namespace riskprop {

enum class PlantKind {
  kPhishingStar,          // many one-shot victims -> core -> few cash-out accounts
  kCollusionUpstream,     // source -> few-transaction feeders -> core -> cash-out
  kLaunderingDownstream,  // victims -> core -> one-shot sinks -> cash-out
  kZeroOutMiddle,         // core -> middle chain passing everything on -> exit
  kRoundTransfer,         // exchange -> wallet -> same exchange
};

std::string_view to_string(PlantKind kind);
std::optional<PlantKind> parse_plant_kind(std::string_view text);

struct PlantParams {
  std::size_t size = 40;   // victims, feeders, sinks or round-trip wallets
  std::size_t fanout = 2;  // cash-out targets, or transfers per chain hop
  std::size_t depth = 3;   // middle accounts in a zero-out chain
};

struct PlantSpec {
  PlantKind kind = PlantKind::kPhishingStar;
  PlantParams params;
};

struct SynthSpec {
  std::size_t n_payers = 100;
  std::size_t n_payees = 400;
  std::size_t n_transactions = 5000;
  std::uint64_t seed = 0;
  // Exchange-like hub: one deposit from every base payer and this many
  // withdrawals to fresh accounts. 0 disables the hub.
  std::size_t hub_withdrawals = 0;
  std::vector<PlantSpec> plants;
  // Base payers / hub withdrawal recipients additionally labeled licit-other.
  std::size_t licit_payers = 0;
  std::size_t licit_recipients = 0;

  // Throws Error when the spec cannot be generated.
  void validate() const;
};

struct Corpus {
  std::vector<TransactionRecord> records;
  LabelTable labels;
  std::vector<Address> planted;  // accounts labeled phish-hack by plants
  std::optional<Address> hub;
};

// `0x` + 2 hex digits of tag + 38 hex digits of index.
Address synthetic_address(std::uint8_t tag, std::uint64_t index);

// n_transactions records with payer and payee drawn uniformly from disjoint
// pools of n_payers and n_payees accounts.
Corpus random_network(const SynthSpec& spec);

// Adds one motif on top of `base`. Cash-out targets are the highest in-degree
// accounts already present, fresh accounts when there are none. Core accounts
// of the motif are labeled phish-hack.
Corpus plant_pattern(Corpus base, PlantKind kind, const PlantParams& params, std::uint64_t seed);

// Adds the exchange-like hub described in SynthSpec, labeled exchange.
Corpus plant_exchange_hub(Corpus base, std::size_t withdrawals, std::uint64_t seed);

// random_network, then the hub, then every plant in order, then licit labels.
Corpus generate_corpus(const SynthSpec& spec);

struct BenchRow {
  std::size_t edges = 0;  // collapsed payer->payee edges
  std::size_t transactions = 0;
  std::size_t nodes = 0;  // payer nodes + payee nodes
  std::size_t iterations = 0;
  double build_ms = 0.0;      // graph construction and scoring
  double propagate_ms = 0.0;  // fixed-point iteration
  double total_ms = 0.0;
  double per_iteration_ms() const { return iterations ? propagate_ms / static_cast<double>(iterations) : 0.0; }
};

// For each transaction count, a random network with payers = payees =
// count / 4 is generated (untimed), then built, scored and propagated.
std::vector<BenchRow> scalability_benchmark(const std::vector<std::size_t>& transaction_counts,
                                            const PropagationConfig& config, std::uint64_t seed,
                                            unsigned threads = 1);

// `edges,nodes,iterations,build_ms,propagate_ms,total_ms` with a header row.
void write_bench(std::ostream& out, const std::vector<BenchRow>& rows);

}  // namespace riskprop
