#pragma once

// Fixed-point propagation of payer Reliability, payee Trustiness and edge
// Confidence over a scored payer/payee graph.
//
// One iteration runs three phases separated by a barrier:
//   T(v)    = Σ_in  mult·Score·Conf_prev / in_count(v)
//   R(u)    = Σ_out mult·Conf_prev       / out_count(u)
//   Conf(e) = clamp01((R(u) + 1 − |Score(e) − T(v)|) / 2)   with the new T, R
// followed by the change measure Δ = max(Δ_T, Δ_R, Δ_C). Iteration stops when
// Δ < epsilon or after max_iterations.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <vector>

#include "riskprop/graph.hpp"
#include "riskprop/ingest.hpp"

namespace riskprop {

enum class PropagationMode { kUnsupervised, kSemiSupervised };

struct PropagationConfig {
  double init_trustiness = 0.5;
  double init_reliability = 0.7;
  double init_confidence = 0.5;
  double epsilon = 0.01;
  std::size_t max_iterations = 1000;
  PropagationMode mode = PropagationMode::kUnsupervised;
  // Initial reliability of labeled training payers, by category. Categories
  // without an entry fall back to init_reliability.
  std::map<Category, double> label_init = {
      {Category::kIcoWallet, 0.9}, {Category::kConverter, 0.9}, {Category::kMining, 0.9},
      {Category::kExchange, 0.7},  {Category::kGambling, 0.4},  {Category::kPhishHack, 0.0},
  };
  // Keep labeled illicit training payers at their initial reliability.
  bool clamp_illicit = true;
  // Divide each Δ sum by its element count (edge sums by transaction count).
  bool normalized_delta = false;
  unsigned threads = 1;

  // Throws Error on out-of-range values.
  void validate() const;
};

struct DeltaRow {
  std::size_t iteration = 0;
  double delta_trustiness = 0.0;
  double delta_reliability = 0.0;
  double delta_confidence = 0.0;
  double delta = 0.0;
};

struct PropagationState {
  std::vector<double> trustiness;   // per payee, in [-1, 1]
  std::vector<double> reliability;  // per payer, in [0, 1]
  std::vector<double> confidence;   // per edge, in [0, 1]
  // Payers whose reliability is held at its initial value.
  std::vector<std::uint8_t> fixed_reliability;
  std::size_t iteration = 0;
  std::vector<DeltaRow> trace;  // one row per completed iteration
  // Edges whose raw confidence left [0, 1] and was clamped, summed over all
  // completed iterations.
  std::uint64_t confidence_clamps = 0;
};

enum class Termination { kConverged, kMaxIterations };

struct PropagationResult {
  PropagationState state;
  Termination termination = Termination::kConverged;
};

// Starting state. Semi-supervised mode requires labels and a training set:
// labeled training payers start from label_init, everyone else from
// init_reliability. Throws Error when supervision is missing.
PropagationState initialize(const PayerPayeeGraph& graph, const PropagationConfig& config,
                            const LabelTable* labels = nullptr,
                            const std::set<Address>* training = nullptr);

std::vector<double> update_trustiness(const PropagationState& state, const PayerPayeeGraph& graph,
                                      unsigned threads = 1);
std::vector<double> update_reliability(const PropagationState& state,
                                       const PayerPayeeGraph& graph, unsigned threads = 1);

struct ConfidenceUpdate {
  std::vector<double> confidence;
  std::uint64_t clamped = 0;
};
// Reads the current-iteration trustiness and reliability held in `state`.
ConfidenceUpdate update_confidence(const PropagationState& state, const PayerPayeeGraph& graph,
                                   unsigned threads = 1);

// Summed absolute change between two states over the same graph. Edge terms
// are weighted by multiplicity. Throws Error if the state shapes differ.
DeltaRow compute_delta(const PropagationState& prev, const PropagationState& curr,
                       const PayerPayeeGraph& graph, bool normalized = false);

// Runs one full iteration and appends its trace row. Throws Error on a
// non-finite value.
PropagationState step(const PropagationState& state, const PayerPayeeGraph& graph,
                      const PropagationConfig& config);

PropagationResult iterate_until_convergence(const PayerPayeeGraph& graph,
                                            const PropagationConfig& config,
                                            const LabelTable* labels = nullptr,
                                            const std::set<Address>* training = nullptr);

// Continues from an existing state (for example a loaded checkpoint).
PropagationResult iterate_until_convergence(const PayerPayeeGraph& graph,
                                            const PropagationConfig& config,
                                            PropagationState state);

// `t,delta_T,delta_R,delta_C,delta` per iteration after a commented header
// carrying M and the contraction factor.
void write_trace(std::ostream& out, const PropagationState& state, const PayerPayeeGraph& graph);

// `kind,key,value` lines with kind in {payer, payee, edge}; edge keys are
// `payer->payee`.
void write_checkpoint(std::ostream& out, const PropagationState& state,
                      const PayerPayeeGraph& graph);
PropagationState read_checkpoint(std::istream& in, const PayerPayeeGraph& graph);

}  // namespace riskprop
