#include "riskprop/synth.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <map>
#include <ostream>

#include "riskprop/error.hpp"
#include "riskprop/graph.hpp"
#include "riskprop/random.hpp"

namespace riskprop {
namespace {

constexpr std::uint8_t kPayerTag = 0x01;
constexpr std::uint8_t kPayeeTag = 0x02;
constexpr std::uint8_t kHubTag = 0x20;
constexpr std::uint8_t kRecipientTag = 0x21;

std::uint8_t plant_tag(PlantKind kind) { return static_cast<std::uint8_t>(0x30 + static_cast<int>(kind)); }

constexpr std::pair<PlantKind, std::string_view> kKindNames[] = {
    {PlantKind::kPhishingStar, "phishing-star"},
    {PlantKind::kCollusionUpstream, "collusion-upstream"},
    {PlantKind::kLaunderingDownstream, "laundering-downstream"},
    {PlantKind::kZeroOutMiddle, "zero-out-middle"},
    {PlantKind::kRoundTransfer, "round-transfer"},
};

// Hands out fresh addresses under one tag, continuing after any index
// already present in the records.
class AddressAllocator {
public:
  AddressAllocator(const std::vector<TransactionRecord>& records, std::uint8_t tag) : tag_(tag) {
    const std::string prefix = synthetic_address(tag, 0).substr(0, 4);
    auto scan = [&](const Address& a) {
      if (a.size() != 42 || a.compare(0, 4, prefix) != 0) return;
      const std::uint64_t idx = std::stoull(a.substr(4), nullptr, 16);
      next_ = std::max<std::uint64_t>(next_, idx + 1);
    };
    for (const auto& r : records) {
      scan(r.payer);
      scan(r.payee);
    }
  }

  Address next() { return synthetic_address(tag_, next_++); }

private:
  std::uint8_t tag_;
  std::uint64_t next_ = 0;
};

class RecordSink {
public:
  explicit RecordSink(std::vector<TransactionRecord>& records) : records_(records) {}

  void add(const Address& from, const Address& to, std::uint64_t value) {
    records_.push_back({"t" + std::to_string(records_.size()), from, to, Amount(value), std::nullopt});
  }

private:
  std::vector<TransactionRecord>& records_;
};

// Up to n accounts with the highest incoming transaction count, ties by
// address; fresh accounts from `alloc` fill any shortfall.
std::vector<Address> cash_out_targets(const std::vector<TransactionRecord>& records, std::size_t n,
                                      AddressAllocator& alloc) {
  std::map<Address, std::size_t> in_count;
  for (const auto& r : records) ++in_count[r.payee];
  std::vector<std::pair<std::size_t, Address>> ranked;
  for (auto& [a, c] : in_count) ranked.emplace_back(c, a);
  std::sort(ranked.begin(), ranked.end(), [](const auto& x, const auto& y) {
    if (x.first != y.first) return x.first > y.first;
    return x.second < y.second;
  });
  std::vector<Address> out;
  for (std::size_t i = 0; i < std::min(n, ranked.size()); ++i) out.push_back(ranked[i].second);
  while (out.size() < n) out.push_back(alloc.next());
  return out;
}

constexpr std::uint64_t kEther = 1'000'000'000'000'000'000ULL;

std::uint64_t random_value(Rng& rng) { return 1 + rng.below(kEther); }

void label_core(Corpus& c, const Address& a) {
  c.labels.set(a, Category::kPhishHack);
  c.planted.push_back(a);
}

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

}  // namespace

std::string_view to_string(PlantKind kind) {
  for (const auto& [k, name] : kKindNames)
    if (k == kind) return name;
  return "unknown";
}

std::optional<PlantKind> parse_plant_kind(std::string_view text) {
  for (const auto& [k, name] : kKindNames)
    if (name == text) return k;
  return std::nullopt;
}

Address synthetic_address(std::uint8_t tag, std::uint64_t index) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "0x%02x%038llx", static_cast<unsigned>(tag),
                static_cast<unsigned long long>(index));
  return buf;
}

void SynthSpec::validate() const {
  if (n_transactions == 0) throw Error("synthetic corpus needs at least one transaction");
  if (n_payers == 0 || n_payees == 0) throw Error("synthetic corpus needs payers and payees");
  if (licit_payers > n_payers) throw Error("more licit payers requested than payers exist");
  if (licit_recipients > hub_withdrawals)
    throw Error("more licit recipients requested than hub withdrawals exist");
  for (const auto& p : plants) {
    if (p.params.size == 0) throw Error("plant size must be positive");
    if (p.params.fanout == 0) throw Error("plant fanout must be positive");
    if (p.kind == PlantKind::kZeroOutMiddle && p.params.depth == 0)
      throw Error("zero-out chain needs at least one middle account");
  }
}

Corpus random_network(const SynthSpec& spec) {
  spec.validate();
  Corpus corpus;
  corpus.records.reserve(spec.n_transactions);
  Rng rng(spec.seed);
  RecordSink sink(corpus.records);
  for (std::size_t i = 0; i < spec.n_transactions; ++i) {
    const auto payer = rng.below(spec.n_payers);
    const auto payee = rng.below(spec.n_payees);
    sink.add(synthetic_address(kPayerTag, payer), synthetic_address(kPayeeTag, payee),
             random_value(rng));
  }
  return corpus;
}

Corpus plant_pattern(Corpus base, PlantKind kind, const PlantParams& params, std::uint64_t seed) {
  Rng rng(seed);
  AddressAllocator alloc(base.records, plant_tag(kind));
  const auto targets = cash_out_targets(base.records, params.fanout, alloc);
  RecordSink sink(base.records);

  switch (kind) {
    case PlantKind::kPhishingStar: {
      const auto core = alloc.next();
      label_core(base, core);
      for (std::size_t i = 0; i < params.size; ++i) sink.add(alloc.next(), core, random_value(rng));
      for (const auto& t : targets) sink.add(core, t, random_value(rng));
      break;
    }
    case PlantKind::kCollusionUpstream: {
      const auto core = alloc.next();
      const auto source = alloc.next();
      label_core(base, core);
      for (std::size_t i = 0; i < params.size; ++i) {
        const auto feeder = alloc.next();
        const auto v = random_value(rng);
        sink.add(source, feeder, v);
        sink.add(feeder, core, v);
      }
      for (const auto& t : targets) sink.add(core, t, random_value(rng));
      break;
    }
    case PlantKind::kLaunderingDownstream: {
      const auto core = alloc.next();
      label_core(base, core);
      for (std::size_t i = 0; i < params.fanout; ++i) sink.add(alloc.next(), core, random_value(rng));
      for (std::size_t i = 0; i < params.size; ++i) {
        const auto mule = alloc.next();
        const auto v = random_value(rng);
        sink.add(core, mule, v);
        sink.add(mule, targets[i % targets.size()], v);
      }
      break;
    }
    case PlantKind::kZeroOutMiddle: {
      // Each hop passes `fanout` transfers onward, keeping a small fee.
      std::vector<Address> chain{alloc.next()};
      for (std::size_t i = 0; i < params.depth; ++i) chain.push_back(alloc.next());
      chain.push_back(targets.front());
      for (std::size_t i = 1; i + 1 < chain.size(); ++i) label_core(base, chain[i]);
      for (std::size_t i = 0; i < params.size; ++i) sink.add(alloc.next(), chain.front(), random_value(rng));
      for (std::size_t k = 0; k < params.fanout; ++k) {
        std::uint64_t v = kEther + rng.below(kEther);
        for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
          sink.add(chain[i], chain[i + 1], v);
          v -= v / 1000;
        }
      }
      break;
    }
    case PlantKind::kRoundTransfer: {
      const auto& exchange = targets.front();
      for (std::size_t i = 0; i < params.size; ++i) {
        const auto wallet = alloc.next();
        label_core(base, wallet);
        const auto v = random_value(rng);
        sink.add(exchange, wallet, v);
        sink.add(wallet, exchange, v - v / 1000);
      }
      break;
    }
  }
  return base;
}

Corpus plant_exchange_hub(Corpus base, std::size_t withdrawals, std::uint64_t seed) {
  Rng rng(seed);
  AddressAllocator hub_alloc(base.records, kHubTag);
  AddressAllocator recipient_alloc(base.records, kRecipientTag);
  const auto hub = hub_alloc.next();

  std::vector<Address> depositors;
  for (const auto& r : base.records) depositors.push_back(r.payer);
  std::sort(depositors.begin(), depositors.end());
  depositors.erase(std::unique(depositors.begin(), depositors.end()), depositors.end());

  RecordSink sink(base.records);
  for (const auto& d : depositors) sink.add(d, hub, random_value(rng));
  for (std::size_t i = 0; i < withdrawals; ++i) sink.add(hub, recipient_alloc.next(), random_value(rng));
  base.labels.set(hub, Category::kExchange);
  base.hub = hub;
  return base;
}

Corpus generate_corpus(const SynthSpec& spec) {
  auto corpus = random_network(spec);
  // Independent streams per stage, all derived from the one seed.
  std::uint64_t stage = 1;
  if (spec.hub_withdrawals > 0)
    corpus = plant_exchange_hub(std::move(corpus), spec.hub_withdrawals, mix64(spec.seed + stage++));
  for (const auto& p : spec.plants)
    corpus = plant_pattern(std::move(corpus), p.kind, p.params, mix64(spec.seed + stage++));

  Rng rng(mix64(spec.seed + stage++));
  auto pick = [&](std::uint8_t tag, std::size_t pool, std::size_t count) {
    std::vector<std::uint64_t> idx(pool);
    for (std::size_t i = 0; i < pool; ++i) idx[i] = i;
    for (std::size_t i = 0; i < count; ++i) {
      std::swap(idx[i], idx[i + rng.below(pool - i)]);
      const auto a = synthetic_address(tag, idx[i]);
      if (!corpus.labels.find(a)) corpus.labels.set(a, Category::kLicitOther);
    }
  };
  pick(kPayerTag, spec.n_payers, spec.licit_payers);
  pick(kRecipientTag, spec.hub_withdrawals, spec.licit_recipients);
  return corpus;
}

std::vector<BenchRow> scalability_benchmark(const std::vector<std::size_t>& transaction_counts,
                                            const PropagationConfig& config, std::uint64_t seed,
                                            unsigned threads) {
  std::vector<BenchRow> rows;
  for (std::size_t n : transaction_counts) {
    SynthSpec spec;
    spec.n_transactions = n;
    spec.n_payers = std::max<std::size_t>(1, n / 4);
    spec.n_payees = std::max<std::size_t>(1, n / 4);
    spec.seed = seed;
    const auto corpus = random_network(spec);

    BenchRow row;
    row.transactions = n;
    const auto t0 = std::chrono::steady_clock::now();
    const auto graph = score_all_edges(build_graph(corpus.records), threads);
    row.build_ms = elapsed_ms(t0);

    auto cfg = config;
    cfg.threads = threads;
    const auto t1 = std::chrono::steady_clock::now();
    const auto result = iterate_until_convergence(graph, cfg);
    row.propagate_ms = elapsed_ms(t1);

    row.total_ms = row.build_ms + row.propagate_ms;
    row.edges = graph.edges().size();
    row.nodes = graph.payers().size() + graph.payees().size();
    row.iterations = result.state.iteration;
    rows.push_back(row);
  }
  return rows;
}

void write_bench(std::ostream& out, const std::vector<BenchRow>& rows) {
  out << "edges,nodes,iterations,build_ms,propagate_ms,total_ms\n";
  char buf[128];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%zu,%zu,%zu,%.3f,%.3f,%.3f\n", r.edges, r.nodes, r.iterations,
                  r.build_ms, r.propagate_ms, r.total_ms);
    out << buf;
  }
}

}  // namespace riskprop
