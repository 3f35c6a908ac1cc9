// Copyright 2026 The qnswap Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qnswap/pfqn.hpp"

namespace qnswap {

const NodeAnalysis& NetworkAnalysis::node(int id) const {
  for (const NodeAnalysis& n : nodes)
    if (n.node == id) return n;
  fail(ErrorCode::UnknownNodeReference, "node " + std::to_string(id) + " was not analyzed");
}

namespace {

void check_override(const AnalysisAssumptions& assumptions) {
  if (assumptions.blocking_probability_override) {
    const double pb = *assumptions.blocking_probability_override;
    if (!(pb >= 0.0 && pb <= 1.0))
      fail(ErrorCode::ProbabilityOutOfRange, "blocking probability override");
  }
}

double full_probability(const NetworkSpec& spec, int node, const AnalysisAssumptions& assumptions,
                        const ArrivalRates* rates) {
  const NodeSpec& n = spec.node(node);
  const double rho = assumptions.rho_one ? 1.0 : rates->at(node) / n.service_rate;
  return mm1k_full_probability(rho, n.capacity);
}

double blocking_probability(const NetworkSpec& spec, int node,
                            const AnalysisAssumptions& assumptions, const ArrivalRates* rates) {
  if (spec.node(node).kind != NodeKind::Intermediate)
    fail(ErrorCode::NodeNotIntermediate, "node " + std::to_string(node));
  check_override(assumptions);
  if (assumptions.blocking_probability_override) return *assumptions.blocking_probability_override;
  double pb = 0.0;
  for (const auto& [to, p] : spec.routing.row(node))
    pb += p * full_probability(spec, to, assumptions, rates);
  return pb;
}

}  // namespace

double worst_case_blocking_probability(const NetworkSpec& spec, int node,
                                       const AnalysisAssumptions& assumptions,
                                       const ArrivalRates& rates) {
  return blocking_probability(spec, node, assumptions, &rates);
}

double worst_case_blocking_probability(const NetworkSpec& spec, int node,
                                       const AnalysisAssumptions& assumptions) {
  if (assumptions.rho_one || assumptions.blocking_probability_override)
    return blocking_probability(spec, node, assumptions, nullptr);
  const ArrivalRates rates = solve_traffic(spec);
  return blocking_probability(spec, node, assumptions, &rates);
}

NetworkAnalysis analyze_network(const NetworkSpec& spec, const AnalysisAssumptions& assumptions,
                                const std::optional<std::vector<int>>& subset) {
  check_override(assumptions);
  const ArrivalRates rates = solve_traffic(spec);

  NetworkAnalysis out{assumptions, {}, {}};
  std::vector<NodeMetrics> metrics;
  std::vector<int> intermediate;
  for (const NodeSpec& n : spec.nodes) {
    if (n.kind != NodeKind::Intermediate) continue;
    if (!(n.unblock_rate > 0.0))
      fail(ErrorCode::MissingUnblockRate, "node " + std::to_string(n.id));
    const double lambda = rates.at(n.id);
    const double pb = worst_case_blocking_probability(spec, n.id, assumptions, rates);
    auto marginal = blocking_node_closed_form(lambda, n.service_rate, n.unblock_rate, pb);
    NodeMetrics m = node_metrics(n.id, marginal, lambda);
    metrics.push_back(m);
    intermediate.push_back(n.id);
    out.nodes.push_back(NodeAnalysis{n.id, lambda, pb, std::move(marginal), m});
  }
  const std::vector<int>& chosen = subset ? *subset : intermediate;
  out.network = network_metrics(metrics, rates.total_external, chosen);
  return out;
}

}  // namespace qnswap
