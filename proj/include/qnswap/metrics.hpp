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

#include <span>
#include <utility>
#include <vector>

#include "qnswap/ctmc.hpp"

namespace qnswap {

struct NodeMetrics {
  int node = 0;
  double arrival_rate = 0.0;
  double utilization = 0.0;         // 1 - pi(0,0)
  double mean_jobs = 0.0;           // pi(1,0) + pi(0,1)
  double mean_response_time = 0.0;  // mean_jobs / arrival_rate

  bool operator==(const NodeMetrics&) const = default;
};

struct NetworkMetrics {
  /// Arithmetic mean of the per-node mean jobs over `subset`.
  double mean_jobs = 0.0;
  /// mean_jobs / external_rate.
  double mean_response_time = 0.0;
  double external_rate = 0.0;
  /// Conventional network population: the plain sum over `subset`.
  double total_jobs = 0.0;
  std::vector<int> subset;

  bool operator==(const NetworkMetrics&) const = default;
};

/// Metrics of a capacity-one blocking station from its three-state marginal.
NodeMetrics node_metrics(int node, const MarginalDistribution<double>& pi, double arrival_rate);

/// Aggregates `nodes` restricted to `subset` (ids); the result does not
/// depend on the order of either list.
NetworkMetrics network_metrics(std::span<const NodeMetrics> nodes, double external_rate,
                               std::span<const int> subset);

struct HopBounds {
  int min = 0;
  int max = 0;
};

struct SwapDepthReport {
  double predicted_response_time = 0.0;
  int observed_depth = 0;
  double absolute_gap = 0.0;
  double relative_gap = 0.0;
  HopBounds hop_bounds;
  bool within_hop_bounds = false;
};

/// Puts the predicted mean response time next to an observed SWAP depth.
/// No conversion between the two is implied.
SwapDepthReport swap_depth_report(const NetworkMetrics& net, int observed_depth,
                                  HopBounds hop_bounds);

}  // namespace qnswap
