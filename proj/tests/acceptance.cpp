// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit status if
// any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "oracles.hpp"
#include "riskprop/cli.hpp"
#include "riskprop/eval.hpp"
#include "riskprop/graph.hpp"
#include "riskprop/propagation.hpp"
#include "riskprop/rating.hpp"
#include "riskprop/synth.hpp"
#include "test_graphs.hpp"

using namespace riskprop;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ---------------------------------------------------------------------------
// 1. Score against the arbitrary-precision oracle, and base invariance.

Outcome score_fidelity() {
  const auto t0 = Clock::now();
  std::mt19937_64 gen(101);
  double worst_oracle = 0.0, worst_base = 0.0;
  for (int i = 0; i < 1000; ++i) {
    // Mix small and large maxima so both regimes are exercised.
    const std::uint64_t cap = i % 2 ? 1'000'000 : 64;
    const std::uint64_t max_out = 1 + gen() % cap;
    const std::uint64_t max_in = 1 + gen() % cap;
    const std::uint64_t out = 1 + gen() % max_out;
    const std::uint64_t in = 1 + gen() % max_in;
    const double s = deanonymous_score(out, in, max_out, max_in);
    worst_oracle = std::max(worst_oracle, std::abs(s - oracle::deanonymous_score(out, in, max_out, max_in)));
    for (double (*lg)(double) : {static_cast<double (*)(double)>(std::log2),
                                 static_cast<double (*)(double)>(std::log10)}) {
      auto side = [lg](std::uint64_t c, std::uint64_t m) {
        return m > 1 ? (2 * lg(static_cast<double>(c)) - lg(static_cast<double>(m))) / lg(static_cast<double>(m))
                     : 0.0;
      };
      const double in_base = (side(out, max_out) + side(in, max_in)) / 2;
      worst_base = std::max(worst_base, std::abs(s - in_base));
    }
  }
  const double elapsed = seconds_since(t0);
  return {worst_oracle <= 1e-12 && worst_base <= 1e-12 && elapsed < 1.0,
          fmt("max |err| vs 50-digit oracle %.3g, max base-2/10 deviation %.3g, %.3f s (limits 1e-12, 1e-12, 1 s)",
              worst_oracle, worst_base, elapsed)};
}

// ---------------------------------------------------------------------------
// 2. Phase order on single-edge networks.

Outcome update_order() {
  const auto neg = PayerPayeeGraph::from_edges({{"0xa", "0xb", 1, -1.0}}, true);
  const auto s = step(initialize(neg, {}), neg, {});
  const bool exact = s.trustiness[0] == -0.5 && s.reliability[0] == 0.5 && s.confidence[0] == 0.5;

  const auto zero = PayerPayeeGraph::from_edges({{"0xa", "0xb", 1, 0.0}}, true);
  PropagationConfig config;
  config.epsilon = 1e-9;
  const auto r = iterate_until_convergence(zero, config).state;
  const double err = std::max({std::abs(r.trustiness[0]), std::abs(r.reliability[0] - 1.0),
                               std::abs(r.confidence[0] - 1.0)});
  return {exact && err <= 1e-6,
          fmt("score -1 after one step (T,R,C) = (%g, %g, %g); score 0 fixed point error %.3g after %zu iterations",
              s.trustiness[0], s.reliability[0], s.confidence[0], err, r.iteration)};
}

// ---------------------------------------------------------------------------
// 3. Monotonicity of the three update equations under single-input changes.

struct Fixture {
  PayerPayeeGraph graph;
  PropagationState state;
};

Fixture random_fixture(std::mt19937_64& gen) {
  auto graph = testing_graphs::random_scored_graph(gen, 24, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0), signed_unit(-1.0, 1.0);
  PropagationState s;
  for (std::size_t v = 0; v < graph.payees().size(); ++v) s.trustiness.push_back(signed_unit(gen));
  for (std::size_t u = 0; u < graph.payers().size(); ++u) s.reliability.push_back(unit(gen));
  for (std::size_t e = 0; e < graph.edges().size(); ++e) s.confidence.push_back(0.01 + 0.98 * unit(gen));
  s.fixed_reliability.assign(s.reliability.size(), 0);
  return {std::move(graph), std::move(s)};
}

// Confidence of edge e computed by the library from explicit T and R.
double confidence_of(const Fixture& f, std::size_t e) {
  return update_confidence(f.state, f.graph).confidence[e];
}

Outcome update_monotonicity() {
  const auto t0 = Clock::now();
  constexpr int kTrials = 10000;
  std::mt19937_64 gen(303);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int violations[5] = {0, 0, 0, 0, 0};
  int checked[5] = {0, 0, 0, 0, 0};

  for (int trial = 0; trial < kTrials; ++trial) {
    auto f = random_fixture(gen);
    const auto edges = f.graph.edges();
    const std::size_t e = gen() % edges.size();
    const auto u = edges[e].payer;
    const auto v = edges[e].payee;
    const double s = edges[e].score;

    // raise one incoming score.
    {
      std::vector<double> scores;
      for (const auto& edge : edges) scores.push_back(edge.score);
      const double up = s + (1.0 - s) * (0.01 + 0.99 * unit(gen));
      if (up > s) {
        scores[e] = up;
        const auto raised = f.graph.with_scores(scores);
        const double before = update_trustiness(f.state, f.graph)[v];
        const double after = update_trustiness(f.state, raised)[v];
        ++checked[0];
        violations[0] += !(after > before);
      }
    }
    // raise confidence on a positive-score incoming edge.
    if (s > 1e-6) {
      auto g = f.state;
      g.confidence[e] += (1.0 - g.confidence[e]) * (0.01 + 0.99 * unit(gen));
      ++checked[1];
      violations[1] += !(update_trustiness(g, f.graph)[v] > update_trustiness(f.state, f.graph)[v]);
    }
    // move the payee's trustiness away from the edge score while the
    // raw confidence stays inside [0, 1].
    {
      const double d = std::abs(s - f.state.trustiness[v]);
      const double room = std::min(1.0 + f.state.reliability[u], 2.0) - d;
      const double dir = f.state.trustiness[v] >= s ? 1.0 : -1.0;
      const double limit = dir > 0 ? 1.0 - f.state.trustiness[v] : f.state.trustiness[v] + 1.0;
      const double step = std::min(room, limit) * (0.01 + 0.98 * unit(gen));
      if (step > 1e-9) {
        const double before = confidence_of(f, e);
        auto g = f;
        g.state.trustiness[v] += dir * step;
        ++checked[2];
        violations[2] += !(confidence_of(g, e) < before);
      }
    }
    // raise the payer's reliability where the result is not clamped at 0.
    {
      auto g = f;
      g.state.reliability[u] += (1.0 - g.state.reliability[u]) * (0.01 + 0.99 * unit(gen));
      const double raw_after = (g.state.reliability[u] + 1.0 - std::abs(s - g.state.trustiness[v])) / 2.0;
      if (raw_after > 0.0 && g.state.reliability[u] > f.state.reliability[u]) {
        ++checked[3];
        violations[3] += !(confidence_of(g, e) > confidence_of(f, e));
      }
    }
    // raise one outgoing confidence.
    {
      auto g = f.state;
      g.confidence[e] += (1.0 - g.confidence[e]) * (0.01 + 0.99 * unit(gen));
      ++checked[4];
      violations[4] += !(update_reliability(g, f.graph)[u] > update_reliability(f.state, f.graph)[u]);
    }
  }
  const double elapsed = seconds_since(t0);
  const int total = violations[0] + violations[1] + violations[2] + violations[3] + violations[4];
  return {total == 0 && elapsed < 5.0,
          fmt("violations T~score / T~conf / C~distance / C~R / R~conf = %d/%d/%d/%d/%d over %d/%d/%d/%d/%d checks, %.2f s (limit 5 s)", violations[0],
              violations[1], violations[2], violations[3], violations[4], checked[0], checked[1], checked[2],
              checked[3], checked[4], elapsed)};
}

// ---------------------------------------------------------------------------
// 4 and 5. Contraction bound and uniqueness on 50 random graphs without
// clamp activations.

std::vector<PayerPayeeGraph> contraction_graphs(int& rejected) {
  std::mt19937_64 gen(404);
  std::uniform_real_distribution<double> bound(0.05, 0.89);
  std::vector<PayerPayeeGraph> graphs;
  rejected = 0;
  while (graphs.size() < 50) {
    auto g = testing_graphs::random_scored_graph(gen, 200, bound(gen));
    PropagationConfig probe;
    probe.max_iterations = 500;
    probe.epsilon = 1e-300;
    bool clamps = iterate_until_convergence(g, probe).state.confidence_clamps > 0;
    for (double c0 : {0.3, 0.7}) {
      probe.init_confidence = c0;
      clamps = clamps || iterate_until_convergence(g, probe).state.confidence_clamps > 0;
    }
    if (clamps) {
      ++rejected;
      continue;
    }
    graphs.push_back(std::move(g));
  }
  return graphs;
}

Outcome contraction(const std::vector<PayerPayeeGraph>& graphs, int rejected) {
  // Conf^∞ is itself an estimate, off by at most alpha^500 (< 1e-12 here).
  constexpr double kSlack = 1e-12;
  std::size_t violations = 0, comparisons = 0;
  double worst_ratio = 0.0, max_alpha = 0.0;
  for (const auto& g : graphs) {
    const double alpha = g.contraction_factor();
    max_alpha = std::max(max_alpha, alpha);
    PropagationConfig limit_config;
    limit_config.max_iterations = 500;
    limit_config.epsilon = 1e-300;
    const auto limit = iterate_until_convergence(g, limit_config).state;
    auto s = initialize(g, {});
    for (int t = 1; t <= 20; ++t) {
      s = step(s, g, {});
      const double bound = std::pow(alpha, t);
      for (std::size_t e = 0; e < s.confidence.size(); ++e) {
        const double gap = std::abs(s.confidence[e] - limit.confidence[e]);
        ++comparisons;
        violations += gap > bound + kSlack;
        worst_ratio = std::max(worst_ratio, gap / bound);
      }
    }
  }
  return {violations == 0,
          fmt("%zu violations in %zu comparisons on %zu graphs (max alpha %.4f, worst gap/bound %.3g, "
              "%d candidate graphs with clamping skipped)",
              violations, comparisons, graphs.size(), max_alpha, worst_ratio, rejected)};
}

Outcome uniqueness(const std::vector<PayerPayeeGraph>& graphs) {
  double worst = 0.0;
  bool converged = true;
  for (const auto& g : graphs) {
    PropagationConfig low, high;
    low.epsilon = high.epsilon = 1e-9;
    low.init_confidence = 0.3;
    high.init_confidence = 0.7;
    const auto a = iterate_until_convergence(g, low);
    const auto b = iterate_until_convergence(g, high);
    converged = converged && a.termination == Termination::kConverged && b.termination == Termination::kConverged;
    for (std::size_t e = 0; e < a.state.confidence.size(); ++e)
      worst = std::max(worst, std::abs(a.state.confidence[e] - b.state.confidence[e]));
    for (std::size_t u = 0; u < a.state.reliability.size(); ++u)
      worst = std::max(worst, std::abs(a.state.reliability[u] - b.state.reliability[u]));
    for (std::size_t v = 0; v < a.state.trustiness.size(); ++v)
      worst = std::max(worst, std::abs(a.state.trustiness[v] - b.state.trustiness[v]));
  }
  return {converged && worst <= 1e-6,
          fmt("max element-wise difference %.3g between Conf0 = 0.3 and 0.7 runs (limit 1e-6), all converged: %s",
              worst, converged ? "yes" : "no")};
}

// ---------------------------------------------------------------------------
// 6 and 7. Planted phishing cores next to an exchange hub.

struct PlantedRun {
  Corpus corpus;
  PayerPayeeGraph graph;
  RiskReport report;
};

PlantedRun planted_run(std::uint64_t seed) {
  SynthSpec spec;
  spec.seed = seed;
  spec.hub_withdrawals = 100;
  spec.licit_payers = 10;
  spec.licit_recipients = 5;
  for (std::size_t victims : {40, 30, 50, 25, 35})
    spec.plants.push_back({PlantKind::kPhishingStar, {victims, 1, 3}});
  auto corpus = generate_corpus(spec);
  auto graph = score_all_edges(build_graph(extract_largest_wcc(filter_zero_value(corpus.records))));
  const PropagationConfig config;
  auto report = risk_of(iterate_until_convergence(graph, config).state, graph, config);
  return {std::move(corpus), std::move(graph), std::move(report)};
}

Outcome planted_ranking(const std::vector<PlantedRun>& runs) {
  int ranking_ok = 0, anova_wins = 0;
  double min_margin = 1e300, f_deanon_min = 1e300, f_random_max = 0.0;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& run = runs[i];
    std::map<Address, double> risk;
    for (const auto& row : run.report.rows) risk[row.address] = row.risk;
    const double hub_risk = risk.at(*run.corpus.hub);
    bool above = true;
    for (const auto& core : run.corpus.planted) {
      above = above && risk.at(core) > hub_risk;
      min_margin = std::min(min_margin, risk.at(core) - hub_risk);
    }
    const auto ranked = top_k(run.report, run.report.rows.size());
    std::vector<std::size_t> ks;
    for (std::size_t k = 1; k <= run.corpus.planted.size(); ++k) ks.push_back(k);
    bool perfect = true;
    for (const auto& pt : precision_recall_at_k(ranked, run.corpus.labels, ks)) perfect = perfect && pt.precision == 1.0;
    ranking_ok += above && perfect;

    const auto deanon = transaction_score_groups(run.graph, run.corpus.labels);
    const auto random = transaction_score_groups(ablation_random_scores(run.graph, i), run.corpus.labels);
    const double fd = one_way_anova(deanon.illicit, deanon.licit).f_statistic;
    const double fr = one_way_anova(random.illicit, random.licit).f_statistic;
    anova_wins += fd > fr;
    f_deanon_min = std::min(f_deanon_min, fd);
    f_random_max = std::max(f_random_max, fr);
  }
  const int n = static_cast<int>(runs.size());
  return {ranking_ok == n && anova_wins >= 9,
          fmt("cores above hub with P@k = 1 for k <= #cores in %d/%d seeds (min core-hub risk margin %.3f); "
              "ANOVA F de-anonymous > random in %d/%d seeds (need 9; min F de-anonymous %.3g, max F random %.3g)",
              ranking_ok, n, min_margin, anova_wins, n, f_deanon_min, f_random_max)};
}

Outcome sweep_shape(const std::vector<PlantedRun>& runs) {
  std::vector<double> thresholds;
  for (int r = 1; r <= 10; ++r) thresholds.push_back(r);
  int bad_precision = 0, bad_recall = 0, undefined = 0;
  for (const auto& run : runs) {
    const auto rows = threshold_sweep(run.report, run.corpus.labels, thresholds);
    std::optional<double> last_precision;
    double last_recall = 1.0;
    for (const auto& row : rows) {
      const auto& m = row.metrics.illicit;
      if (m.recall > last_recall) ++bad_recall;
      last_recall = m.recall;
      // Precision is undefined when no labeled account is flagged.
      if (m.predicted == 0) {
        ++undefined;
        continue;
      }
      if (last_precision && m.precision < *last_precision) ++bad_precision;
      last_precision = m.precision;
    }
  }
  return {bad_precision == 0 && bad_recall == 0,
          fmt("rth 1..10 on %zu planted corpora: %d precision decreases, %d recall increases "
              "(%d thresholds with no flagged labeled account, precision undefined there)",
              runs.size(), bad_precision, bad_recall, undefined)};
}

// ---------------------------------------------------------------------------
// 8. Per-iteration time against edge count.

Outcome scalability() {
  const auto t0 = Clock::now();
  const std::vector<std::size_t> sizes{10'000, 20'000, 50'000, 100'000, 200'000, 400'000, 700'000, 1'000'000};
  const auto rows = scalability_benchmark(sizes, PropagationConfig{}, 8, 1);
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  const double n = static_cast<double>(rows.size());
  for (const auto& r : rows) {
    const double x = static_cast<double>(r.edges), y = r.per_iteration_ms();
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  const double cov = sxy - sx * sy / n, vx = sxx - sx * sx / n, vy = syy - sy * sy / n;
  const double r2 = vy > 0 ? cov * cov / (vx * vy) : 0.0;
  const double elapsed = seconds_since(t0);
  std::string ladder;
  for (const auto& r : rows) ladder += fmt(" %zu:%.3f", r.edges, r.per_iteration_ms());
  return {r2 >= 0.95 && elapsed < 300.0 && rows.front().edges >= 9'000 && rows.back().edges >= 900'000,
          fmt("R^2 %.4f (limit 0.95), %.1f s total (limit 300 s); edges:ms/iteration", r2, elapsed) + ladder};
}

// ---------------------------------------------------------------------------
// 9. Byte-identical reports for 1 and N threads through the CLI.

Outcome determinism() {
  namespace fs = std::filesystem;
  const auto dir = fs::temp_directory_path() / "riskprop_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const auto path = [&](const char* name) { return (dir / name).string(); };
  std::ostringstream sink;
  int code = run_cli({"synth", "--payers", "20000", "--payees", "20000", "--txns", "120000", "--seed", "9", "--hub",
                      "200", "--plant", "phishing-star:40:1", "--out", path("tx.csv")},
                     sink, sink);
  const unsigned many = std::max(4u, std::thread::hardware_concurrency());
  const int a = run_cli({"rate", "--transactions", path("tx.csv"), "--threads", "1", "--out", path("a.csv")}, sink, sink);
  const int b = run_cli({"rate", "--transactions", path("tx.csv"), "--threads", std::to_string(many), "--out",
                         path("b.csv")},
                        sink, sink);
  auto slurp = [](const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  const auto ra = slurp(path("a.csv")), rb = slurp(path("b.csv"));
  fs::remove_all(dir);
  const bool ok = code == 0 && a != kExitFailure && b != kExitFailure && !ra.empty() && ra == rb;
  return {ok, fmt("threads 1 vs %u: exit codes %d/%d, report sizes %zu/%zu bytes, identical: %s", many, a, b,
                  ra.size(), rb.size(), ra == rb ? "yes" : "no")};
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int id, const char* name, const std::function<Outcome()>& check) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s [%d] %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(),
                seconds_since(t0));
    std::fflush(stdout);
  };

  report(1, "de-anonymous score fidelity", score_fidelity);
  report(2, "update-order oracle", update_order);
  report(3, "update-equation monotonicity", update_monotonicity);

  int rejected = 0;
  std::vector<PayerPayeeGraph> graphs;
  report(4, "convergence rate bound", [&] {
    graphs = contraction_graphs(rejected);
    return contraction(graphs, rejected);
  });
  report(5, "uniqueness of the fixed point", [&] { return uniqueness(graphs); });

  std::vector<PlantedRun> runs;
  report(6, "planted phishing cores vs exchange hub", [&] {
    for (std::uint64_t seed = 0; seed < 10; ++seed) runs.push_back(planted_run(seed));
    return planted_ranking(runs);
  });
  report(7, "threshold sweep shape", [&] { return sweep_shape(runs); });
  report(8, "linear scalability", scalability);
  report(9, "thread-count determinism", determinism);

  std::printf("%d of 9 criteria passed\n", 9 - failures);
  return failures == 0 ? 0 : 1;
}
