#pragma once

// Evaluation against labeled accounts: classification and ranking metrics,
// one-way ANOVA of edge scores, the two ablation baselines and the risk
// threshold sweep.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "riskprop/graph.hpp"
#include "riskprop/ingest.hpp"
#include "riskprop/rating.hpp"

namespace riskprop {

using Predictions = std::map<Address, Prediction>;

Predictions predictions_of(const RiskReport& report);

struct ClassMetrics {
  double precision = 0.0;  // 0 when nothing is predicted in the class
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;    // labeled members
  std::size_t predicted = 0;  // labeled accounts predicted in the class
};

struct CurvePoint {
  std::size_t k = 0;
  double precision = 0.0;
  double recall = 0.0;
};

struct EvalMetrics {
  ClassMetrics illicit;
  ClassMetrics licit;
  double accuracy = 0.0;
  std::optional<double> auc;
  std::size_t evaluated = 0;  // labeled accounts that had a prediction
  std::vector<CurvePoint> curve;
};

// Per-class precision/recall/F1 and accuracy over labeled accounts that have
// a prediction (optionally restricted to `subset`). Unlabeled accounts are
// ignored. Throws Error when no labeled account can be scored.
EvalMetrics classification_metrics(const Predictions& predictions, const LabelTable& labels,
                                   const std::set<Address>* subset = nullptr);

// Probability that a random illicit account outscores a random licit one,
// ties counting one half. Throws Error unless both classes are present.
double auc(std::span<const double> scores, std::span<const std::uint8_t> illicit);

// AUC of the report's risk values over labeled accounts.
double auc(const RiskReport& report, const LabelTable& labels,
           const std::set<Address>* subset = nullptr);

// P@k counts only labeled accounts among the top k unless `strict`, where
// every account in the top k counts. R@k divides by the labeled illicit
// accounts present in the ranking.
std::vector<CurvePoint> precision_recall_at_k(std::span<const Address> ranked,
                                              const LabelTable& labels,
                                              std::span<const std::size_t> ks,
                                              bool strict = false,
                                              const std::set<Address>* subset = nullptr);

struct AnovaResult {
  double ss_between = 0.0;
  double ss_within = 0.0;
  double ss_total = 0.0;
  double ms_between = 0.0;
  double ms_within = 0.0;
  double f_statistic = 0.0;
  double p_value = 1.0;
  std::size_t df_between = 0;
  std::size_t df_within = 0;
};

// Standard one-way ANOVA with the p-value from the F distribution. Needs at
// least two groups of two samples; throws Error when every sample is equal.
AnovaResult one_way_anova(std::span<const std::vector<double>> groups);
AnovaResult one_way_anova(std::span<const double> group_a, std::span<const double> group_b);

// Regularized incomplete beta I_x(a, b) by continued fraction.
double regularized_incomplete_beta(double a, double b, double x);

// P(F > f) for an F(d1, d2) variable. Values below 1e-300 are returned as 0.
double f_distribution_sf(double f, double d1, double d2);

// Edge scores split by payer label, one sample per transaction. Edges whose
// payer is unlabeled (or outside `subset`) are left out.
struct ScoreGroups {
  std::vector<double> illicit;
  std::vector<double> licit;
};
ScoreGroups transaction_score_groups(const PayerPayeeGraph& graph, const LabelTable& labels,
                                     const std::set<Address>* subset = nullptr);

// Average outgoing de-anonymous score per payer; illicit iff ADS ≤ 0.
struct AdsRow {
  Address address;
  double ads = 0.0;
  Prediction predicted = Prediction::kLicit;
};
std::vector<AdsRow> ablation_ads(const PayerPayeeGraph& graph);
Predictions predictions_of(const std::vector<AdsRow>& rows);

// Uniform score on [-1, 1) for edge `index`, a pure function of (seed, index).
double counter_uniform_score(std::uint64_t seed, std::uint64_t index);

// Replaces every edge score with counter_uniform_score(seed, edge index).
PayerPayeeGraph ablation_random_scores(const PayerPayeeGraph& graph, std::uint64_t seed);

struct SweepRow {
  double rth = 0.0;
  EvalMetrics metrics;
};
// classification_metrics at each threshold; the AUC column is that of the
// binary prediction at the threshold.
std::vector<SweepRow> threshold_sweep(const RiskReport& report, const LabelTable& labels,
                                      std::span<const double> thresholds,
                                      const std::set<Address>* subset = nullptr);

struct Split {
  std::set<Address> training;
  std::set<Address> test;
};
// Per-class (illicit / licit) shuffle of the labeled accounts in `universe`
// (all labels when null) with round(ratio·n) of each class in training.
Split stratified_split(const LabelTable& labels, double ratio, std::uint64_t seed,
                       const std::set<Address>* universe = nullptr);

struct MeanStd {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation, 0 for a single value
};
MeanStd mean_std(std::span<const double> values);

// `metric,value` lines; names are prefixed with `prefix` when non-empty.
void write_metrics(std::ostream& out, const EvalMetrics& metrics, const std::string& prefix = {});
void write_anova(std::ostream& out, const AnovaResult& result, const std::string& prefix);
// `k,precision,recall` lines with a header row.
void write_curve(std::ostream& out, std::span<const CurvePoint> curve);

}  // namespace riskprop
