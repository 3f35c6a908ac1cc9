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

#include "qnswap/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace qnswap {

NodeMetrics node_metrics(int node, const MarginalDistribution<double>& pi, double arrival_rate) {
  if (!(arrival_rate > 0.0))
    fail(ErrorCode::ZeroArrivalRate, "node " + std::to_string(node));
  if (!(pi.states() == StateSpace::blocking_node()))
    fail(ErrorCode::DimensionMismatch, "node metrics need a blocking-node marginal");
  using namespace blocking_state;
  NodeMetrics m;
  m.node = node;
  m.arrival_rate = arrival_rate;
  m.utilization = 1.0 - pi[kIdle];
  m.mean_jobs = pi[kBusy] + pi[kBlocked];
  m.mean_response_time = m.mean_jobs / arrival_rate;
  return m;
}

NetworkMetrics network_metrics(std::span<const NodeMetrics> nodes, double external_rate,
                               std::span<const int> subset) {
  if (subset.empty()) fail(ErrorCode::EmptySubset, "network metrics need at least one node");
  if (!(external_rate > 0.0)) fail(ErrorCode::ZeroArrivalRate, "external rate");

  const std::set<int> ids(subset.begin(), subset.end());
  NetworkMetrics out;
  out.external_rate = external_rate;
  // Summation in ascending id order keeps the result permutation invariant.
  for (int id : ids) {
    auto it = std::find_if(nodes.begin(), nodes.end(),
                           [id](const NodeMetrics& m) { return m.node == id; });
    if (it == nodes.end())
      fail(ErrorCode::UnknownNodeReference, "no metrics for node " + std::to_string(id));
    out.total_jobs += it->mean_jobs;
    out.subset.push_back(id);
  }
  out.mean_jobs = out.total_jobs / static_cast<double>(ids.size());
  out.mean_response_time = out.mean_jobs / external_rate;
  return out;
}

SwapDepthReport swap_depth_report(const NetworkMetrics& net, int observed_depth,
                                  HopBounds hop_bounds) {
  if (observed_depth < 1) fail(ErrorCode::InvalidArgument, "observed depth must be >= 1");
  if (hop_bounds.min > hop_bounds.max) fail(ErrorCode::InvalidArgument, "hop bounds inverted");
  SwapDepthReport r;
  r.predicted_response_time = net.mean_response_time;
  r.observed_depth = observed_depth;
  r.absolute_gap = std::abs(static_cast<double>(observed_depth) - net.mean_response_time);
  r.relative_gap = r.absolute_gap / static_cast<double>(observed_depth);
  r.hop_bounds = hop_bounds;
  r.within_hop_bounds = net.mean_response_time >= hop_bounds.min &&
                        net.mean_response_time <= hop_bounds.max;
  return r;
}

}  // namespace qnswap
