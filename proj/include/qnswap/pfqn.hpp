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

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qnswap/ctmc.hpp"
#include "qnswap/metrics.hpp"
#include "qnswap/model.hpp"
#include "qnswap/traffic.hpp"

namespace qnswap {

struct AnalysisAssumptions {
  /// Evaluate neighbour fullness in the rho = 1 limit, 1/(K+1).
  bool rho_one = true;
  /// Uniform P_b for every intermediate node instead of the per-node value.
  std::optional<double> blocking_probability_override;
  /// Jackson product form: the joint distribution needs no renormalization.
  static constexpr double normalization_constant = 1.0;
};

struct NodeAnalysis {
  int node = 0;
  double arrival_rate = 0.0;
  double blocking_probability = 0.0;
  MarginalDistribution<double> marginal;
  NodeMetrics metrics;
};

struct NetworkAnalysis {
  AnalysisAssumptions assumptions;
  std::vector<NodeAnalysis> nodes;  // intermediate nodes, spec order
  NetworkMetrics network;

  const NodeAnalysis& node(int id) const;
};

/// P_b(i) = sum_j p_ij * P(node j full). Neighbour fullness uses the
/// M/M/1/K full-system probability, at rho = 1 under `rho_one`, otherwise
/// at rho_j = lambda_j / mu_j from `rates`.
double worst_case_blocking_probability(const NetworkSpec& spec, int node,
                                       const AnalysisAssumptions& assumptions,
                                       const ArrivalRates& rates);
double worst_case_blocking_probability(const NetworkSpec& spec, int node,
                                       const AnalysisAssumptions& assumptions = {});

/// Marginal and metrics of every intermediate node, aggregated over `subset`
/// (default: all intermediate nodes) with lambda = total external rate.
NetworkAnalysis analyze_network(const NetworkSpec& spec, const AnalysisAssumptions& assumptions = {},
                                const std::optional<std::vector<int>>& subset = std::nullopt);

/// Product of per-node marginals at the given joint state.
template <typename Scalar>
Scalar joint_probability(std::span<const MarginalDistribution<Scalar>> marginals,
                         std::span<const std::string> joint_state) {
  if (marginals.size() != joint_state.size())
    fail(ErrorCode::DimensionMismatch, "one state per marginal is required");
  Scalar p = Scalar(AnalysisAssumptions::normalization_constant);
  for (std::size_t i = 0; i < marginals.size(); ++i) p *= marginals[i][joint_state[i]];
  return p;
}

}  // namespace qnswap
