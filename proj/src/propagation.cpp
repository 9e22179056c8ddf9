#include "riskprop/propagation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <string>

#include "riskprop/error.hpp"
#include "riskprop/parallel.hpp"

namespace riskprop {
namespace {

double sum_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) total += std::abs(a[i] - b[i]);
  return total;
}

void check_finite(const std::vector<double>& values, const char* what, std::size_t iteration) {
  for (double v : values)
    if (!std::isfinite(v))
      throw Error(std::string("non-finite ") + what + " at iteration " + std::to_string(iteration));
}

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void PropagationConfig::validate() const {
  auto in = [](double v, double lo, double hi) { return v >= lo && v <= hi; };
  if (!in(init_trustiness, -1.0, 1.0)) throw Error("init trustiness must lie in [-1, 1]");
  if (!in(init_reliability, 0.0, 1.0)) throw Error("init reliability must lie in [0, 1]");
  if (!in(init_confidence, 0.0, 1.0)) throw Error("init confidence must lie in [0, 1]");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw Error("epsilon must be positive");
  if (max_iterations == 0) throw Error("max iterations must be positive");
  for (const auto& [category, r] : label_init)
    if (!in(r, 0.0, 1.0))
      throw Error("label init for " + std::string(to_string(category)) + " must lie in [0, 1]");
}

PropagationState initialize(const PayerPayeeGraph& graph, const PropagationConfig& config,
                            const LabelTable* labels, const std::set<Address>* training) {
  config.validate();
  PropagationState state;
  state.trustiness.assign(graph.payees().size(), config.init_trustiness);
  state.reliability.assign(graph.payers().size(), config.init_reliability);
  state.confidence.assign(graph.edges().size(), config.init_confidence);
  state.fixed_reliability.assign(graph.payers().size(), 0);

  if (config.mode == PropagationMode::kSemiSupervised) {
    if (labels == nullptr || training == nullptr)
      throw Error("semi-supervised propagation needs labels and a training set");
    for (const auto& address : *training) {
      const auto payer = graph.find_payer(address);
      const auto category = labels->find(address);
      if (!payer || !category) continue;
      if (const auto it = config.label_init.find(*category); it != config.label_init.end())
        state.reliability[*payer] = it->second;
      if (config.clamp_illicit && is_illicit(*category)) state.fixed_reliability[*payer] = 1;
    }
  }
  return state;
}

std::vector<double> update_trustiness(const PropagationState& state, const PayerPayeeGraph& graph,
                                      unsigned threads) {
  const auto edges = graph.edges();
  std::vector<double> next(graph.payees().size());
  parallel_for(next.size(), threads, [&](std::size_t v) {
    double sum = 0.0;
    for (EdgeIndex e : graph.in_edges(static_cast<NodeIndex>(v)))
      sum += static_cast<double>(edges[e].multiplicity) * edges[e].score * state.confidence[e];
    next[v] = sum / static_cast<double>(graph.in_count(static_cast<NodeIndex>(v)));
  });
  return next;
}

std::vector<double> update_reliability(const PropagationState& state,
                                       const PayerPayeeGraph& graph, unsigned threads) {
  std::vector<double> next(graph.payers().size());
  parallel_for(next.size(), threads, [&](std::size_t u) {
    const auto payer = static_cast<NodeIndex>(u);
    if (!state.fixed_reliability.empty() && state.fixed_reliability[u]) {
      next[u] = state.reliability[u];
      return;
    }
    const EdgeIndex first = graph.first_out_edge(payer);
    double sum = 0.0;
    const auto out = graph.out_edges(payer);
    for (std::size_t k = 0; k < out.size(); ++k)
      sum += static_cast<double>(out[k].multiplicity) * state.confidence[first + k];
    next[u] = sum / static_cast<double>(graph.out_count(payer));
  });
  return next;
}

ConfidenceUpdate update_confidence(const PropagationState& state, const PayerPayeeGraph& graph,
                                   unsigned threads) {
  const auto edges = graph.edges();
  ConfidenceUpdate result;
  result.confidence.resize(edges.size());
  std::vector<std::uint8_t> clamped(edges.size(), 0);
  parallel_for(edges.size(), threads, [&](std::size_t i) {
    const auto& e = edges[i];
    const double raw =
        (state.reliability[e.payer] + 1.0 - std::abs(e.score - state.trustiness[e.payee])) / 2.0;
    const double c = std::clamp(raw, 0.0, 1.0);
    clamped[i] = c != raw;
    result.confidence[i] = c;
  });
  for (auto flag : clamped) result.clamped += flag;
  return result;
}

DeltaRow compute_delta(const PropagationState& prev, const PropagationState& curr,
                       const PayerPayeeGraph& graph, bool normalized) {
  if (prev.trustiness.size() != curr.trustiness.size() ||
      prev.reliability.size() != curr.reliability.size() ||
      prev.confidence.size() != curr.confidence.size() ||
      curr.trustiness.size() != graph.payees().size() ||
      curr.reliability.size() != graph.payers().size() ||
      curr.confidence.size() != graph.edges().size())
    throw Error("states do not belong to the same graph");

  DeltaRow row;
  row.iteration = curr.iteration;
  row.delta_trustiness = sum_abs_diff(prev.trustiness, curr.trustiness);
  row.delta_reliability = sum_abs_diff(prev.reliability, curr.reliability);
  const auto edges = graph.edges();
  for (std::size_t i = 0; i < edges.size(); ++i)
    row.delta_confidence += static_cast<double>(edges[i].multiplicity) *
                            std::abs(prev.confidence[i] - curr.confidence[i]);
  if (normalized) {
    row.delta_trustiness /= static_cast<double>(curr.trustiness.size());
    row.delta_reliability /= static_cast<double>(curr.reliability.size());
    row.delta_confidence /= static_cast<double>(graph.transaction_count());
  }
  row.delta = std::max({row.delta_trustiness, row.delta_reliability, row.delta_confidence});
  return row;
}

PropagationState step(const PropagationState& state, const PayerPayeeGraph& graph,
                      const PropagationConfig& config) {
  PropagationState next;
  next.iteration = state.iteration + 1;
  next.fixed_reliability = state.fixed_reliability;
  next.trustiness = update_trustiness(state, graph, config.threads);
  next.reliability = update_reliability(state, graph, config.threads);
  // Confidence reads the trustiness/reliability just computed.
  next.confidence = state.confidence;
  auto conf = update_confidence(next, graph, config.threads);
  next.confidence = std::move(conf.confidence);
  next.confidence_clamps = state.confidence_clamps + conf.clamped;

  check_finite(next.trustiness, "trustiness", next.iteration);
  check_finite(next.reliability, "reliability", next.iteration);
  check_finite(next.confidence, "confidence", next.iteration);

  next.trace = state.trace;
  next.trace.push_back(compute_delta(state, next, graph, config.normalized_delta));
  return next;
}

PropagationResult iterate_until_convergence(const PayerPayeeGraph& graph,
                                            const PropagationConfig& config,
                                            PropagationState state) {
  if (!graph.scored()) throw Error("graph edges have not been scored");
  config.validate();
  PropagationResult result;
  result.termination = Termination::kMaxIterations;
  for (std::size_t i = 0; i < config.max_iterations; ++i) {
    // step() copies the trace; move it aside to keep each iteration O(|S|).
    auto trace = std::move(state.trace);
    state.trace.clear();
    state = step(state, graph, config);
    trace.push_back(state.trace.back());
    state.trace = std::move(trace);
    if (state.trace.back().delta < config.epsilon) {
      result.termination = Termination::kConverged;
      break;
    }
  }
  result.state = std::move(state);
  return result;
}

PropagationResult iterate_until_convergence(const PayerPayeeGraph& graph,
                                            const PropagationConfig& config,
                                            const LabelTable* labels,
                                            const std::set<Address>* training) {
  return iterate_until_convergence(graph, config, initialize(graph, config, labels, training));
}

void write_trace(std::ostream& out, const PropagationState& state, const PayerPayeeGraph& graph) {
  out << "# max_score=" << format_real(graph.max_score())
      << " max_abs_score=" << format_real(graph.max_abs_score())
      << " alpha=" << format_real(graph.contraction_factor()) << '\n';
  out << "t,delta_T,delta_R,delta_C,delta\n";
  for (const auto& row : state.trace)
    out << row.iteration << ',' << format_real(row.delta_trustiness) << ','
        << format_real(row.delta_reliability) << ',' << format_real(row.delta_confidence) << ','
        << format_real(row.delta) << '\n';
}

void write_checkpoint(std::ostream& out, const PropagationState& state,
                      const PayerPayeeGraph& graph) {
  out << "# iteration=" << state.iteration << '\n';
  for (std::size_t u = 0; u < state.reliability.size(); ++u)
    out << "payer," << graph.payers()[u] << ',' << format_real(state.reliability[u]) << '\n';
  for (std::size_t v = 0; v < state.trustiness.size(); ++v)
    out << "payee," << graph.payees()[v] << ',' << format_real(state.trustiness[v]) << '\n';
  const auto edges = graph.edges();
  for (std::size_t i = 0; i < edges.size(); ++i)
    out << "edge," << graph.payers()[edges[i].payer] << "->" << graph.payees()[edges[i].payee]
        << ',' << format_real(state.confidence[i]) << '\n';
}

PropagationState read_checkpoint(std::istream& in, const PayerPayeeGraph& graph) {
  PropagationState state;
  state.trustiness.assign(graph.payees().size(), 0.0);
  state.reliability.assign(graph.payers().size(), 0.0);
  state.confidence.assign(graph.edges().size(), 0.0);
  state.fixed_reliability.assign(graph.payers().size(), 0);
  std::vector<std::uint8_t> seen_payer(graph.payers().size()), seen_payee(graph.payees().size()),
      seen_edge(graph.edges().size());

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line.rfind("# iteration=", 0) == 0) state.iteration = std::stoull(line.substr(12));
      continue;
    }
    const auto c1 = line.find(',');
    const auto c2 = line.rfind(',');
    if (c1 == std::string::npos || c1 == c2) throw ParseError("expected kind,key,value", line_no);
    const std::string kind = line.substr(0, c1);
    const std::string key = line.substr(c1 + 1, c2 - c1 - 1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(line.data() + c2 + 1, line.data() + line.size(), value);
    if (ec != std::errc{} || ptr != line.data() + line.size())
      throw ParseError("unparseable value", line_no);

    if (kind == "payer") {
      const auto u = graph.find_payer(key);
      if (!u) throw ParseError("unknown payer " + key, line_no);
      state.reliability[*u] = value;
      seen_payer[*u] = 1;
    } else if (kind == "payee") {
      const auto v = graph.find_payee(key);
      if (!v) throw ParseError("unknown payee " + key, line_no);
      state.trustiness[*v] = value;
      seen_payee[*v] = 1;
    } else if (kind == "edge") {
      const auto arrow = key.find("->");
      const auto u = arrow == std::string::npos ? std::nullopt : graph.find_payer(key.substr(0, arrow));
      if (!u) throw ParseError("unknown edge " + key, line_no);
      const auto payee = key.substr(arrow + 2);
      const auto out = graph.out_edges(*u);
      const auto it = std::find_if(out.begin(), out.end(), [&](const Edge& e) {
        return graph.payees()[e.payee] == payee;
      });
      if (it == out.end()) throw ParseError("unknown edge " + key, line_no);
      const auto idx = graph.first_out_edge(*u) + static_cast<std::size_t>(it - out.begin());
      state.confidence[idx] = value;
      seen_edge[idx] = 1;
    } else {
      throw ParseError("unknown kind '" + kind + "'", line_no);
    }
  }
  auto all = [](const std::vector<std::uint8_t>& v) {
    return std::all_of(v.begin(), v.end(), [](std::uint8_t b) { return b != 0; });
  };
  if (!all(seen_payer) || !all(seen_payee) || !all(seen_edge))
    throw Error("checkpoint does not cover every node and edge of the graph");
  return state;
}

}  // namespace riskprop
