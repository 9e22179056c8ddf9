#include "riskprop/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include "riskprop/error.hpp"
#include "riskprop/eval.hpp"
#include "riskprop/graph.hpp"
#include "riskprop/ingest.hpp"
#include "riskprop/parallel.hpp"
#include "riskprop/propagation.hpp"
#include "riskprop/rating.hpp"
#include "riskprop/synth.hpp"

namespace riskprop {
namespace {

// Flags shared by every subcommand that runs the rating pipeline.
struct PipelineOptions {
  std::string transactions;
  std::string labels;
  double epsilon = 0.01;
  std::size_t max_iterations = 1000;
  double init_t = 0.5;
  double init_r = 0.7;
  double init_conf = 0.5;
  bool normalized_delta = false;
  bool semi_supervised = false;
  bool no_clamp = false;
  double split = 0.8;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  double rth = 6.0;
  std::optional<double> top_percent;

  PropagationConfig propagation() const {
    PropagationConfig c;
    c.init_trustiness = init_t;
    c.init_reliability = init_r;
    c.init_confidence = init_conf;
    c.epsilon = epsilon;
    c.max_iterations = max_iterations;
    c.normalized_delta = normalized_delta;
    c.mode = semi_supervised ? PropagationMode::kSemiSupervised : PropagationMode::kUnsupervised;
    c.clamp_illicit = !no_clamp;
    c.threads = resolve_threads(threads);
    return c;
  }
};

void add_pipeline_flags(CLI::App& cmd, PipelineOptions& o, bool labels_required) {
  cmd.add_option("--transactions", o.transactions, "Transactions CSV (tx,from,to,value[,timestamp])")
      ->required()
      ->check(CLI::ExistingFile);
  auto* labels = cmd.add_option("--labels", o.labels, "Labels CSV (address,category)")
                     ->check(CLI::ExistingFile);
  if (labels_required) labels->required();
  cmd.add_option("--epsilon", o.epsilon, "Convergence threshold on delta")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd.add_option("--max-iters", o.max_iterations, "Iteration cap")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd.add_option("--init-t", o.init_t, "Initial trustiness")->check(CLI::Range(-1.0, 1.0))->capture_default_str();
  cmd.add_option("--init-r", o.init_r, "Initial reliability")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  cmd.add_option("--init-conf", o.init_conf, "Initial confidence")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  cmd.add_flag("--normalized-delta", o.normalized_delta, "Divide delta sums by element counts");
  auto* semi = cmd.add_flag("--semi-supervised", o.semi_supervised,
                            "Seed training accounts' reliability from their labels");
  semi->needs(labels);
  cmd.add_flag("--no-clamp", o.no_clamp, "Let labeled illicit training payers update")->needs(semi);
  cmd.add_option("--split", o.split, "Training fraction per class")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  cmd.add_option("--seed", o.seed, "Seed for every random choice")->capture_default_str();
  cmd.add_option("--threads", o.threads, "Worker threads (0 = all cores)")->capture_default_str();
  cmd.add_option("--rth", o.rth, "Risk threshold for the illicit class")
      ->check(CLI::Range(0.0, 10.0))
      ->capture_default_str();
  cmd.add_option("--top-percent", o.top_percent, "Classify the top P% by risk as illicit instead")
      ->check(CLI::Range(0.0, 100.0));
}

std::string real(double v) {
  std::ostringstream s;
  s << std::setprecision(10) << v;
  return s.str();
}

// Effective configuration echoed into output headers. Thread count and
// output paths are left out: they never change the contents.
std::vector<std::string> describe(const std::string& command, const PipelineOptions& o) {
  std::vector<std::string> lines;
  lines.push_back("riskprop " + command);
  lines.push_back("transactions=" + o.transactions);
  if (!o.labels.empty()) lines.push_back("labels=" + o.labels);
  lines.push_back("mode=" + std::string(o.semi_supervised ? "semi-supervised" : "unsupervised"));
  lines.push_back("init_t=" + real(o.init_t) + " init_r=" + real(o.init_r) +
                  " init_conf=" + real(o.init_conf));
  lines.push_back("epsilon=" + real(o.epsilon) + " max_iters=" + std::to_string(o.max_iterations) +
                  " normalized_delta=" + (o.normalized_delta ? "true" : "false"));
  if (o.semi_supervised)
    lines.push_back("split=" + real(o.split) + " clamp_illicit=" + (o.no_clamp ? "false" : "true"));
  lines.push_back("seed=" + std::to_string(o.seed));
  if (o.top_percent)
    lines.push_back("top_percent=" + real(*o.top_percent));
  else
    lines.push_back("rth=" + real(o.rth));
  return lines;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path + " for writing");
  return f;
}

void write_comments(std::ostream& out, const std::vector<std::string>& lines) {
  for (const auto& l : lines) out << "# " << l << '\n';
}

LabelTable load_labels(const std::string& path, std::ostream& err) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  auto parsed = parse_labels(in);
  for (const auto& w : parsed.warnings) err << path << ": line " << w.line << ": " << w.message << '\n';
  return std::move(parsed.labels);
}

struct PipelineRun {
  PayerPayeeGraph graph;
  PropagationResult result;
  RiskReport report;
  std::optional<Split> split;
};

PayerPayeeGraph load_graph(const PipelineOptions& o, std::ostream& err) {
  std::ifstream in(o.transactions);
  if (!in) throw Error("cannot open " + o.transactions);
  auto parsed = parse_transactions(in);
  for (const auto& e : parsed.errors)
    err << o.transactions << ": line " << e.line << ": " << e.message << " (row skipped)\n";
  const auto total = parsed.records.size();
  auto records = filter_zero_value(std::move(parsed.records));
  const auto nonzero = records.size();
  if (records.empty()) throw Error("no transactions with a positive value");
  records = extract_largest_wcc(records);
  err << "transactions: " << total << " parsed, " << parsed.errors.size() << " skipped, "
      << nonzero << " non-zero, " << records.size() << " in largest component\n";
  return score_all_edges(build_graph(records), resolve_threads(o.threads));
}

std::set<Address> accounts_of(const PayerPayeeGraph& g) {
  std::set<Address> s(g.payers().begin(), g.payers().end());
  s.insert(g.payees().begin(), g.payees().end());
  return s;
}

RiskReport classify_report(RiskReport report, const PipelineOptions& o) {
  return o.top_percent ? classify_top_percent(std::move(report), *o.top_percent)
                       : classify(std::move(report), o.rth);
}

// Propagation and rating over an already scored graph.
PipelineRun rate_graph(PayerPayeeGraph graph, const PipelineOptions& o, const LabelTable* labels) {
  PipelineRun run{std::move(graph), {}, {}, std::nullopt};
  const auto config = o.propagation();
  if (o.semi_supervised) {
    const auto universe = accounts_of(run.graph);
    run.split = stratified_split(*labels, o.split, o.seed, &universe);
    run.result = iterate_until_convergence(run.graph, config, labels, &run.split->training);
  } else {
    run.result = iterate_until_convergence(run.graph, config);
  }
  run.report = classify_report(risk_of(run.result.state, run.graph, config), o);
  return run;
}

void report_termination(const PipelineRun& run, std::ostream& err) {
  const auto& s = run.result.state;
  err << "propagation: " << s.iteration << " iterations, "
      << (run.result.termination == Termination::kConverged ? "converged" : "stopped at iteration cap")
      << ", delta " << (s.trace.empty() ? 0.0 : s.trace.back().delta) << ", alpha "
      << run.graph.contraction_factor() << '\n';
  if (run.graph.saturated())
    err << "warning: some edge score has |score| = 1; convergence is not guaranteed\n";
}

std::vector<double> parse_thresholds(const std::string& text) {
  std::vector<double> out;
  if (const auto dots = text.find(".."); dots != std::string::npos) {
    const double lo = std::stod(text.substr(0, dots));
    const double hi = std::stod(text.substr(dots + 2));
    if (!(lo <= hi)) throw Error("threshold range must be increasing");
    for (double v = lo; v <= hi + 1e-9; v += 1.0) out.push_back(v);
    return out;
  }
  std::stringstream s(text);
  std::string item;
  while (std::getline(s, item, ',')) out.push_back(std::stod(item));
  if (out.empty()) throw Error("empty threshold list");
  return out;
}

// Human-readable summary table.
void print_table(std::ostream& out, const std::string& name, const EvalMetrics& m) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-22s %9s %9s %9s %9s %9s\n", name.c_str(), "precision",
                "recall", "f1", "accuracy", "auc");
  out << buf;
  std::snprintf(buf, sizeof buf, "%-22s %9.4f %9.4f %9.4f %9.4f %9s\n", "  illicit",
                m.illicit.precision, m.illicit.recall, m.illicit.f1, m.accuracy,
                m.auc ? real(*m.auc).substr(0, 6).c_str() : "-");
  out << buf;
  std::snprintf(buf, sizeof buf, "%-22s %9.4f %9.4f %9.4f\n", "  licit", m.licit.precision,
                m.licit.recall, m.licit.f1);
  out << buf;
}

int cmd_rate(const PipelineOptions& o, const std::string& out_path, const std::string& trace_path,
             const std::string& dump_path, const std::string& checkpoint_path, std::ostream& out,
             std::ostream& err) {
  std::optional<LabelTable> labels;
  if (!o.labels.empty()) labels = load_labels(o.labels, err);
  auto run = rate_graph(load_graph(o, err), o, labels ? &*labels : nullptr);
  report_termination(run, err);

  const auto header = describe("rate", o);
  if (out_path.empty()) {
    write_report(out, run.report, header);
  } else {
    auto f = open_output(out_path);
    write_report(f, run.report, header);
  }
  if (!trace_path.empty()) {
    auto f = open_output(trace_path);
    write_comments(f, header);
    write_trace(f, run.result.state, run.graph);
  }
  if (!dump_path.empty()) {
    auto f = open_output(dump_path);
    write_comments(f, header);
    write_graph_dump(f, run.graph);
  }
  if (!checkpoint_path.empty()) {
    auto f = open_output(checkpoint_path);
    write_comments(f, header);
    write_checkpoint(f, run.result.state, run.graph);
  }
  return run.result.termination == Termination::kConverged ? kExitOk : kExitNotConverged;
}

struct EvaluateOptions {
  std::string out;
  std::string curve;
  std::vector<std::size_t> ks{1, 5, 10, 20, 50, 100, 200, 500, 1000};
  bool anova = false;
  std::vector<std::string> ablations;
  std::string sweep;
  bool strict = false;
};

int cmd_evaluate(const PipelineOptions& o, const EvaluateOptions& e, std::ostream& out,
                 std::ostream& err) {
  const auto labels = load_labels(o.labels, err);
  auto run = rate_graph(load_graph(o, err), o, &labels);
  report_termination(run, err);
  const std::set<Address>* subset = run.split ? &run.split->test : nullptr;

  std::ostringstream kv;
  auto metrics = classification_metrics(predictions_of(run.report), labels, subset);
  try {
    metrics.auc = auc(run.report, labels, subset);
  } catch (const Error& ex) {
    err << "auc unavailable: " << ex.what() << '\n';
  }
  const auto ranked = top_k(run.report, run.report.rows.size());
  metrics.curve = precision_recall_at_k(ranked, labels, e.ks, e.strict, subset);
  print_table(out, "riskprop", metrics);
  write_metrics(kv, metrics);
  for (const auto& pt : metrics.curve)
    kv << "precision@" << pt.k << ',' << real(pt.precision) << '\n'
       << "recall@" << pt.k << ',' << real(pt.recall) << '\n';

  if (e.anova) {
    const auto deanon = transaction_score_groups(run.graph, labels, subset);
    const auto random = transaction_score_groups(ablation_random_scores(run.graph, o.seed), labels, subset);
    try {
      const auto a = one_way_anova(deanon.illicit, deanon.licit);
      const auto b = one_way_anova(random.illicit, random.licit);
      write_anova(kv, a, "anova.deanonymous");
      write_anova(kv, b, "anova.random");
      out << "ANOVA F (de-anonymous) " << real(a.f_statistic) << "  p " << real(a.p_value) << '\n'
          << "ANOVA F (random)       " << real(b.f_statistic) << "  p " << real(b.p_value) << '\n';
    } catch (const Error& ex) {
      err << "anova unavailable: " << ex.what() << " (" << deanon.illicit.size() << " illicit, "
          << deanon.licit.size() << " licit transactions)\n";
    }
  }

  for (const auto& kind : e.ablations) {
    EvalMetrics m;
    if (kind == "ads") {
      m = classification_metrics(predictions_of(ablation_ads(run.graph)), labels, subset);
    } else {
      const auto random_run = rate_graph(ablation_random_scores(run.graph, o.seed), o, &labels);
      m = classification_metrics(predictions_of(random_run.report), labels, subset);
    }
    print_table(out, "ablation " + kind, m);
    write_metrics(kv, m, "ablation." + kind);
  }

  if (!e.sweep.empty()) {
    const auto thresholds = parse_thresholds(e.sweep);
    out << "rth  precision  recall  f1      accuracy\n";
    for (const auto& row : threshold_sweep(run.report, labels, thresholds, subset)) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "%-4g %9.4f %7.4f %7.4f %9.4f\n", row.rth,
                    row.metrics.illicit.precision, row.metrics.illicit.recall,
                    row.metrics.illicit.f1, row.metrics.accuracy);
      out << buf;
      write_metrics(kv, row.metrics, "rth=" + real(row.rth));
    }
  }

  const auto header = describe("evaluate", o);
  if (!e.out.empty()) {
    auto f = open_output(e.out);
    write_comments(f, header);
    f << "metric,value\n" << kv.str();
  } else {
    out << "metric,value\n" << kv.str();
  }
  if (!e.curve.empty()) {
    auto f = open_output(e.curve);
    write_comments(f, header);
    write_curve(f, metrics.curve);
  }
  return run.result.termination == Termination::kConverged ? kExitOk : kExitNotConverged;
}

int cmd_sweep(const PipelineOptions& o, const std::string& thresholds_text,
              const std::vector<std::uint64_t>& seeds, const std::string& out_path,
              std::ostream& out, std::ostream& err) {
  const auto labels = load_labels(o.labels, err);
  const auto thresholds = parse_thresholds(thresholds_text);
  const auto graph = load_graph(o, err);

  // metric name -> per-threshold samples over seeds
  const char* names[] = {"illicit.precision", "illicit.recall", "illicit.f1", "accuracy", "auc"};
  std::vector<std::vector<std::vector<double>>> samples(
      thresholds.size(), std::vector<std::vector<double>>(std::size(names)));
  bool all_converged = true;
  for (auto seed : seeds) {
    auto opts = o;
    opts.seed = seed;
    const auto run = rate_graph(graph, opts, &labels);
    all_converged &= run.result.termination == Termination::kConverged;
    const auto rows = threshold_sweep(run.report, labels, thresholds, run.split ? &run.split->test : nullptr);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& m = rows[i].metrics;
      const double values[] = {m.illicit.precision, m.illicit.recall, m.illicit.f1, m.accuracy,
                               m.auc.value_or(0.5)};
      for (std::size_t j = 0; j < std::size(names); ++j) samples[i][j].push_back(values[j]);
    }
  }

  std::ostringstream body;
  body << "rth,metric,mean,stddev\n";
  out << "rth  precision        recall           f1               (mean±sd over " << seeds.size()
      << " seeds)\n";
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    MeanStd stats[std::size(names)];
    for (std::size_t j = 0; j < std::size(names); ++j) {
      stats[j] = mean_std(samples[i][j]);
      body << real(thresholds[i]) << ',' << names[j] << ',' << real(stats[j].mean) << ','
           << real(stats[j].stddev) << '\n';
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-4g %.4f±%.4f    %.4f±%.4f    %.4f±%.4f\n", thresholds[i],
                  stats[0].mean, stats[0].stddev, stats[1].mean, stats[1].stddev, stats[2].mean,
                  stats[2].stddev);
    out << buf;
  }

  auto header = describe("sweep", o);
  std::string seed_list = "seeds=";
  for (std::size_t i = 0; i < seeds.size(); ++i) seed_list += (i ? "," : "") + std::to_string(seeds[i]);
  header.push_back(seed_list);
  header.push_back("thresholds=" + thresholds_text);
  if (!out_path.empty()) {
    auto f = open_output(out_path);
    write_comments(f, header);
    f << body.str();
  }
  return all_converged ? kExitOk : kExitNotConverged;
}

struct BenchOptions {
  std::vector<std::size_t> sizes{10000, 20000, 40000, 80000};
  std::string out;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  double epsilon = 0.01;
  std::size_t max_iterations = 1000;
};

int cmd_bench(const BenchOptions& b, std::ostream& out) {
  PropagationConfig config;
  config.epsilon = b.epsilon;
  config.max_iterations = b.max_iterations;
  const auto rows = scalability_benchmark(b.sizes, config, b.seed, resolve_threads(b.threads));
  std::vector<std::string> header{"riskprop bench", "seed=" + std::to_string(b.seed),
                                  "epsilon=" + real(b.epsilon) + " max_iters=" + std::to_string(b.max_iterations)};
  std::string sizes = "sizes=";
  for (std::size_t i = 0; i < b.sizes.size(); ++i) sizes += (i ? "," : "") + std::to_string(b.sizes[i]);
  header.push_back(sizes);
  if (b.out.empty()) {
    write_comments(out, header);
    write_bench(out, rows);
  } else {
    auto f = open_output(b.out);
    write_comments(f, header);
    write_bench(f, rows);
  }
  return kExitOk;
}

struct SynthOptions {
  SynthSpec spec;
  std::vector<std::string> plants;
  std::string out;
  std::string labels_out;
};

PlantSpec parse_plant(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream s(text);
  std::string item;
  while (std::getline(s, item, ':')) parts.push_back(item);
  if (parts.empty()) throw Error("empty --plant value");
  const auto kind = parse_plant_kind(parts[0]);
  if (!kind) throw Error("unsupported plant kind '" + parts[0] + "'");
  if (parts.size() > 4) throw Error("--plant takes kind[:size[:fanout[:depth]]]");
  PlantSpec p{*kind, {}};
  if (parts.size() > 1) p.params.size = std::stoull(parts[1]);
  if (parts.size() > 2) p.params.fanout = std::stoull(parts[2]);
  if (parts.size() > 3) p.params.depth = std::stoull(parts[3]);
  return p;
}

int cmd_synth(SynthOptions o, std::ostream& out) {
  for (const auto& p : o.plants) o.spec.plants.push_back(parse_plant(p));
  const auto corpus = generate_corpus(o.spec);

  std::vector<std::string> header{
      "riskprop synth",
      "payers=" + std::to_string(o.spec.n_payers) + " payees=" + std::to_string(o.spec.n_payees) +
          " txns=" + std::to_string(o.spec.n_transactions) + " seed=" + std::to_string(o.spec.seed),
      "hub=" + std::to_string(o.spec.hub_withdrawals) + " licit_payers=" +
          std::to_string(o.spec.licit_payers) + " licit_recipients=" + std::to_string(o.spec.licit_recipients)};
  for (const auto& p : o.plants) header.push_back("plant=" + p);

  if (o.out.empty()) {
    write_comments(out, header);
    write_transactions(out, corpus.records);
  } else {
    auto f = open_output(o.out);
    write_comments(f, header);
    write_transactions(f, corpus.records);
  }
  if (!o.labels_out.empty()) {
    auto f = open_output(o.labels_out);
    write_comments(f, header);
    write_labels(f, corpus.labels);
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Account risk rating over payer/payee transaction graphs", "riskprop"};
  app.require_subcommand(1);

  PipelineOptions rate_opts;
  std::string rate_out, trace_path, dump_path, checkpoint_path;
  auto* rate = app.add_subcommand("rate", "Rate every account of a transactions file");
  add_pipeline_flags(*rate, rate_opts, false);
  rate->add_option("--out", rate_out, "Report CSV (default: stdout)");
  rate->add_option("--trace", trace_path, "Per-iteration delta trace CSV");
  rate->add_option("--graph-dump", dump_path, "Scored edge list CSV");
  rate->add_option("--checkpoint", checkpoint_path, "Final propagation state");

  PipelineOptions eval_opts;
  EvaluateOptions eval;
  auto* evaluate = app.add_subcommand("evaluate", "Rate, then score predictions against labels");
  add_pipeline_flags(*evaluate, eval_opts, true);
  evaluate->add_option("--out", eval.out, "metric,value CSV (default: stdout)");
  evaluate->add_option("--curve", eval.curve, "k,precision,recall CSV");
  evaluate->add_option("--ks", eval.ks, "Cutoffs for precision@k / recall@k")->delimiter(',');
  evaluate->add_flag("--anova", eval.anova, "ANOVA of edge scores, de-anonymous vs random");
  evaluate->add_option("--ablation", eval.ablations, "Ablation baseline(s)")
      ->check(CLI::IsMember({"ads", "random"}))
      ->delimiter(',');
  evaluate->add_option("--sweep-rth", eval.sweep, "Thresholds, `lo..hi` or a comma list");
  evaluate->add_flag("--strict-precision", eval.strict, "Count unlabeled top-k accounts as misses");

  PipelineOptions sweep_opts;
  std::string sweep_range = "1..10", sweep_out;
  std::vector<std::uint64_t> sweep_seeds{0};
  auto* sweep = app.add_subcommand("sweep", "Metrics per risk threshold, mean and stddev over seeds");
  add_pipeline_flags(*sweep, sweep_opts, true);
  sweep->add_option("--sweep-rth", sweep_range, "Thresholds, `lo..hi` or a comma list")->capture_default_str();
  sweep->add_option("--seeds", sweep_seeds, "Seeds to repeat over")->delimiter(',');
  sweep->add_option("--out", sweep_out, "rth,metric,mean,stddev CSV");

  BenchOptions bench_opts;
  auto* bench = app.add_subcommand("bench", "Time the pipeline on random networks of growing size");
  bench->add_option("--sizes", bench_opts.sizes, "Transaction counts")->delimiter(',')->capture_default_str();
  bench->add_option("--out", bench_opts.out, "Benchmark CSV (default: stdout)");
  bench->add_option("--seed", bench_opts.seed)->capture_default_str();
  bench->add_option("--threads", bench_opts.threads, "Worker threads (0 = all cores)");
  bench->add_option("--epsilon", bench_opts.epsilon)->check(CLI::PositiveNumber)->capture_default_str();
  bench->add_option("--max-iters", bench_opts.max_iterations)->check(CLI::PositiveNumber)->capture_default_str();

  SynthOptions synth_opts;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic transactions and labels corpus");
  synth->add_option("--payers", synth_opts.spec.n_payers)->check(CLI::PositiveNumber)->capture_default_str();
  synth->add_option("--payees", synth_opts.spec.n_payees)->check(CLI::PositiveNumber)->capture_default_str();
  synth->add_option("--txns", synth_opts.spec.n_transactions)->check(CLI::PositiveNumber)->capture_default_str();
  synth->add_option("--seed", synth_opts.spec.seed)->capture_default_str();
  synth->add_option("--hub", synth_opts.spec.hub_withdrawals, "Exchange hub withdrawals (0 = no hub)");
  synth->add_option("--plant", synth_opts.plants, "kind[:size[:fanout[:depth]]], repeatable");
  synth->add_option("--licit-payers", synth_opts.spec.licit_payers, "Base payers labeled licit");
  synth->add_option("--licit-recipients", synth_opts.spec.licit_recipients,
                    "Hub withdrawal recipients labeled licit");
  synth->add_option("--out", synth_opts.out, "Transactions CSV (default: stdout)");
  synth->add_option("--labels-out", synth_opts.labels_out, "Labels CSV");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(std::move(reversed));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitFailure;
  }

  try {
    if (rate->parsed())
      return cmd_rate(rate_opts, rate_out, trace_path, dump_path, checkpoint_path, out, err);
    if (evaluate->parsed()) return cmd_evaluate(eval_opts, eval, out, err);
    if (sweep->parsed()) return cmd_sweep(sweep_opts, sweep_range, sweep_seeds, sweep_out, out, err);
    if (bench->parsed()) return cmd_bench(bench_opts, out);
    if (synth->parsed()) return cmd_synth(synth_opts, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace riskprop
