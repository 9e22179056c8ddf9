#include "riskprop/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>

#include "riskprop/error.hpp"
#include "riskprop/random.hpp"

namespace riskprop {
namespace {

bool in_subset(const std::set<Address>* subset, const Address& a) {
  return subset == nullptr || subset->count(a) != 0;
}

double safe_ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

ClassMetrics class_metrics(std::size_t tp, std::size_t fp, std::size_t fn) {
  ClassMetrics m;
  m.support = tp + fn;
  m.predicted = tp + fp;
  m.precision = safe_ratio(static_cast<double>(tp), static_cast<double>(tp + fp));
  m.recall = safe_ratio(static_cast<double>(tp), static_cast<double>(tp + fn));
  m.f1 = safe_ratio(2.0 * m.precision * m.recall, m.precision + m.recall);
  return m;
}

std::string real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

// Continued fraction for I_x(a, b), modified Lentz evaluation.
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 10000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h;
  }
  throw Error("incomplete beta continued fraction did not converge");
}

}  // namespace

Predictions predictions_of(const RiskReport& report) {
  Predictions p;
  for (const auto& row : report.rows) p.emplace(row.address, row.predicted);
  return p;
}

EvalMetrics classification_metrics(const Predictions& predictions, const LabelTable& labels,
                                   const std::set<Address>* subset) {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  for (const auto& [address, category] : labels.entries()) {
    if (!in_subset(subset, address)) continue;
    const auto it = predictions.find(address);
    if (it == predictions.end()) continue;
    const bool actual = is_illicit(category);
    const bool predicted = it->second == Prediction::kIllicit;
    if (actual && predicted) ++tp;
    else if (actual) ++fn;
    else if (predicted) ++fp;
    else ++tn;
  }
  const std::size_t total = tp + fp + tn + fn;
  if (total == 0) throw Error("no labeled account has a prediction");

  EvalMetrics m;
  m.evaluated = total;
  m.illicit = class_metrics(tp, fp, fn);
  m.licit = class_metrics(tn, fn, fp);
  m.accuracy = static_cast<double>(tp + tn) / static_cast<double>(total);
  return m;
}

double auc(std::span<const double> scores, std::span<const std::uint8_t> illicit) {
  if (scores.size() != illicit.size()) throw Error("scores and labels differ in length");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Mann-Whitney U with midranks for ties.
  double positive_rank_sum = 0.0;
  std::size_t positives = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k)
      if (illicit[order[k]]) {
        positive_rank_sum += midrank;
        ++positives;
      }
    i = j;
  }
  const std::size_t negatives = scores.size() - positives;
  if (positives == 0 || negatives == 0) throw Error("AUC needs both illicit and licit accounts");
  const double np = static_cast<double>(positives);
  return (positive_rank_sum - np * (np + 1.0) / 2.0) / (np * static_cast<double>(negatives));
}

double auc(const RiskReport& report, const LabelTable& labels, const std::set<Address>* subset) {
  std::vector<double> scores;
  std::vector<std::uint8_t> illicit;
  for (const auto& row : report.rows) {
    if (!in_subset(subset, row.address)) continue;
    const auto category = labels.find(row.address);
    if (!category) continue;
    scores.push_back(row.risk);
    illicit.push_back(is_illicit(*category));
  }
  return auc(scores, illicit);
}

std::vector<CurvePoint> precision_recall_at_k(std::span<const Address> ranked,
                                              const LabelTable& labels,
                                              std::span<const std::size_t> ks, bool strict,
                                              const std::set<Address>* subset) {
  // Prefix counts over the ranking.
  std::vector<std::size_t> labeled_prefix(ranked.size() + 1, 0);
  std::vector<std::size_t> illicit_prefix(ranked.size() + 1, 0);
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    const auto category = in_subset(subset, ranked[i]) ? labels.find(ranked[i]) : std::nullopt;
    labeled_prefix[i + 1] = labeled_prefix[i] + (category ? 1 : 0);
    illicit_prefix[i + 1] = illicit_prefix[i] + (category && is_illicit(*category) ? 1 : 0);
  }
  const double total_illicit = static_cast<double>(illicit_prefix.back());

  std::vector<CurvePoint> curve;
  curve.reserve(ks.size());
  for (std::size_t k : ks) {
    const std::size_t cut = std::min(k, ranked.size());
    const double hits = static_cast<double>(illicit_prefix[cut]);
    const double denom = strict ? static_cast<double>(cut) : static_cast<double>(labeled_prefix[cut]);
    curve.push_back({k, safe_ratio(hits, denom), safe_ratio(hits, total_illicit)});
  }
  return curve;
}

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw Error("incomplete beta needs a, b > 0");
  if (!(x >= 0.0 && x <= 1.0)) throw Error("incomplete beta needs 0 <= x <= 1");
  if (x == 0.0 || x == 1.0) return x;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double f_distribution_sf(double f, double d1, double d2) {
  if (!(d1 > 0.0) || !(d2 > 0.0)) throw Error("F distribution needs positive degrees of freedom");
  if (std::isnan(f)) throw Error("F statistic is NaN");
  if (f <= 0.0) return 1.0;
  if (std::isinf(f)) return 0.0;
  const double x = d2 / (d2 + d1 * f);
  const double p = regularized_incomplete_beta(d2 / 2.0, d1 / 2.0, x);
  return p < 1e-300 ? 0.0 : std::min(1.0, p);
}

AnovaResult one_way_anova(std::span<const std::vector<double>> groups) {
  if (groups.size() < 2) throw Error("ANOVA needs at least two groups");
  std::size_t n = 0;
  double grand_sum = 0.0;
  for (const auto& g : groups) {
    if (g.size() < 2) throw Error("each ANOVA group needs at least two samples");
    n += g.size();
    grand_sum += std::accumulate(g.begin(), g.end(), 0.0);
  }
  const double grand_mean = grand_sum / static_cast<double>(n);

  AnovaResult r;
  for (const auto& g : groups) {
    const double mean = std::accumulate(g.begin(), g.end(), 0.0) / static_cast<double>(g.size());
    r.ss_between += static_cast<double>(g.size()) * (mean - grand_mean) * (mean - grand_mean);
    for (double x : g) {
      r.ss_within += (x - mean) * (x - mean);
      r.ss_total += (x - grand_mean) * (x - grand_mean);
    }
  }
  r.df_between = groups.size() - 1;
  r.df_within = n - groups.size();
  r.ms_between = r.ss_between / static_cast<double>(r.df_between);
  r.ms_within = r.ss_within / static_cast<double>(r.df_within);
  if (r.ss_within == 0.0) {
    if (r.ss_between == 0.0) throw Error("ANOVA is undefined when every sample is equal");
    r.f_statistic = std::numeric_limits<double>::infinity();
    r.p_value = 0.0;
    return r;
  }
  r.f_statistic = r.ms_between / r.ms_within;
  r.p_value = f_distribution_sf(r.f_statistic, static_cast<double>(r.df_between),
                                static_cast<double>(r.df_within));
  return r;
}

AnovaResult one_way_anova(std::span<const double> group_a, std::span<const double> group_b) {
  const std::vector<double> groups[] = {{group_a.begin(), group_a.end()},
                                        {group_b.begin(), group_b.end()}};
  return one_way_anova(groups);
}

ScoreGroups transaction_score_groups(const PayerPayeeGraph& graph, const LabelTable& labels,
                                     const std::set<Address>* subset) {
  ScoreGroups groups;
  for (NodeIndex u = 0; u < graph.payers().size(); ++u) {
    const auto& address = graph.payers()[u];
    if (!in_subset(subset, address)) continue;
    const auto category = labels.find(address);
    if (!category) continue;
    auto& target = is_illicit(*category) ? groups.illicit : groups.licit;
    for (const auto& e : graph.out_edges(u)) target.insert(target.end(), e.multiplicity, e.score);
  }
  return groups;
}

std::vector<AdsRow> ablation_ads(const PayerPayeeGraph& graph) {
  if (!graph.scored()) throw Error("graph edges have not been scored");
  std::vector<AdsRow> rows;
  rows.reserve(graph.payers().size());
  for (NodeIndex u = 0; u < graph.payers().size(); ++u) {
    double sum = 0.0;
    for (const auto& e : graph.out_edges(u)) sum += static_cast<double>(e.multiplicity) * e.score;
    const double ads = sum / static_cast<double>(graph.out_count(u));
    rows.push_back({graph.payers()[u], ads, ads <= 0.0 ? Prediction::kIllicit : Prediction::kLicit});
  }
  return rows;
}

Predictions predictions_of(const std::vector<AdsRow>& rows) {
  Predictions p;
  for (const auto& row : rows) p.emplace(row.address, row.predicted);
  return p;
}

double counter_uniform_score(std::uint64_t seed, std::uint64_t index) {
  return 2.0 * unit_interval(mix64(mix64(seed) ^ index)) - 1.0;
}

PayerPayeeGraph ablation_random_scores(const PayerPayeeGraph& graph, std::uint64_t seed) {
  std::vector<double> scores(graph.edges().size());
  for (std::size_t i = 0; i < scores.size(); ++i) scores[i] = counter_uniform_score(seed, i);
  return graph.with_scores(std::move(scores));
}

std::vector<SweepRow> threshold_sweep(const RiskReport& report, const LabelTable& labels,
                                      std::span<const double> thresholds,
                                      const std::set<Address>* subset) {
  std::vector<SweepRow> rows;
  for (double rth : thresholds) {
    const auto classified = classify(report, rth);
    SweepRow row{rth, classification_metrics(predictions_of(classified), labels, subset)};
    std::vector<double> binary;
    std::vector<std::uint8_t> illicit;
    for (const auto& r : classified.rows) {
      if (!in_subset(subset, r.address)) continue;
      const auto category = labels.find(r.address);
      if (!category) continue;
      binary.push_back(r.predicted == Prediction::kIllicit ? 1.0 : 0.0);
      illicit.push_back(is_illicit(*category));
    }
    const bool both = std::count(illicit.begin(), illicit.end(), 1) > 0 &&
                      std::count(illicit.begin(), illicit.end(), 0) > 0;
    if (both) row.metrics.auc = auc(binary, illicit);
    rows.push_back(std::move(row));
  }
  return rows;
}

Split stratified_split(const LabelTable& labels, double ratio, std::uint64_t seed,
                       const std::set<Address>* universe) {
  if (!(ratio >= 0.0 && ratio <= 1.0)) throw Error("split ratio must lie in [0, 1]");
  std::vector<Address> classes[2];
  for (const auto& [address, category] : labels.entries())
    if (in_subset(universe, address)) classes[is_illicit(category) ? 1 : 0].push_back(address);

  Split split;
  Rng rng(seed);
  for (auto& members : classes) {
    // Fisher-Yates over the address-sorted class.
    for (std::size_t i = members.size(); i > 1; --i)
      std::swap(members[i - 1], members[rng.below(i)]);
    const auto train = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(members.size())));
    for (std::size_t i = 0; i < members.size(); ++i)
      (i < train ? split.training : split.test).insert(members[i]);
  }
  return split;
}

MeanStd mean_std(std::span<const double> values) {
  MeanStd r;
  if (values.empty()) return r;
  r.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - r.mean) * (v - r.mean);
    r.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return r;
}

void write_metrics(std::ostream& out, const EvalMetrics& m, const std::string& prefix) {
  const std::string p = prefix.empty() ? "" : prefix + ".";
  auto line = [&](const char* name, double v) { out << p << name << ',' << real(v) << '\n'; };
  line("illicit.precision", m.illicit.precision);
  line("illicit.recall", m.illicit.recall);
  line("illicit.f1", m.illicit.f1);
  line("licit.precision", m.licit.precision);
  line("licit.recall", m.licit.recall);
  line("licit.f1", m.licit.f1);
  line("accuracy", m.accuracy);
  if (m.auc) line("auc", *m.auc);
  out << p << "evaluated," << m.evaluated << '\n';
}

void write_anova(std::ostream& out, const AnovaResult& r, const std::string& prefix) {
  const std::string p = prefix.empty() ? "" : prefix + ".";
  out << p << "ms_between," << real(r.ms_between) << '\n'
      << p << "ms_within," << real(r.ms_within) << '\n'
      << p << "f," << real(r.f_statistic) << '\n'
      << p << "p_value," << real(r.p_value) << '\n'
      << p << "df_between," << r.df_between << '\n'
      << p << "df_within," << r.df_within << '\n';
}

void write_curve(std::ostream& out, std::span<const CurvePoint> curve) {
  out << "k,precision,recall\n";
  for (const auto& pt : curve) out << pt.k << ',' << real(pt.precision) << ',' << real(pt.recall) << '\n';
}

}  // namespace riskprop
