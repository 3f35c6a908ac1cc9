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

#include "qnswap/traffic.hpp"

#include <deque>

namespace qnswap {

Eigen::MatrixXd dense_routing(const NetworkSpec& spec) {
  const auto n = static_cast<Eigen::Index>(spec.size());
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
  for (const auto& [edge, prob] : spec.routing.entries)
    p(static_cast<Eigen::Index>(spec.index_of(edge.first)),
      static_cast<Eigen::Index>(spec.index_of(edge.second))) += prob;
  return p;
}

Eigen::VectorXd external_vector(const NetworkSpec& spec) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(spec.size()));
  for (std::size_t i = 0; i < spec.size(); ++i)
    v(static_cast<Eigen::Index>(i)) = spec.external_rate(spec.nodes[i].id);
  return v;
}

double ArrivalRates::at(int id) const {
  for (std::size_t i = 0; i < ids.size(); ++i)
    if (ids[i] == id) return rates(static_cast<Eigen::Index>(i));
  fail(ErrorCode::UnknownNodeReference, "no arrival rate for node " + std::to_string(id));
}

double total_external_rate(const NetworkSpec& spec) {
  double sum = 0.0;
  for (const auto& [id, rate] : spec.external_arrivals) sum += rate;
  return sum;
}

namespace {

// Every free node must drain: reach an exit, or a pinned node, over p_ij > 0.
void check_drains(const NetworkSpec& spec, const std::vector<bool>& pinned) {
  const std::size_t n = spec.size();
  std::vector<std::vector<std::size_t>> reverse(n);
  std::vector<bool> drains(n, false);
  std::deque<std::size_t> frontier;
  for (std::size_t i = 0; i < n; ++i) {
    if (pinned[i] || spec.routing.exit_probability(spec.nodes[i].id) > kStochasticEps) {
      drains[i] = true;
      frontier.push_back(i);
    }
  }
  for (const auto& [edge, p] : spec.routing.entries) {
    if (p <= 0.0) continue;
    reverse[spec.index_of(edge.second)].push_back(spec.index_of(edge.first));
  }
  while (!frontier.empty()) {
    const std::size_t j = frontier.front();
    frontier.pop_front();
    for (std::size_t i : reverse[j]) {
      if (!drains[i] && !pinned[i]) {
        drains[i] = true;
        frontier.push_back(i);
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    if (!drains[i])
      fail(ErrorCode::SingularRouting,
           "node " + std::to_string(spec.nodes[i].id) + " has no path out of the network");
}

}  // namespace

ArrivalRates solve_traffic(const NetworkSpec& spec, TrafficMethod method) {
  const std::size_t n = spec.size();
  ArrivalRates out;
  out.total_external = total_external_rate(spec);
  for (const NodeSpec& node : spec.nodes) out.ids.push_back(node.id);
  out.rates = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));

  std::vector<bool> pinned(n, false);
  if (spec.known_arrival_rates) {
    for (std::size_t i = 0; i < n; ++i) {
      auto it = spec.known_arrival_rates->find(spec.nodes[i].id);
      if (it != spec.known_arrival_rates->end()) {
        pinned[i] = true;
        out.rates(static_cast<Eigen::Index>(i)) = it->second;
      }
    }
  }
  check_drains(spec, pinned);

  std::vector<Eigen::Index> free_nodes;
  for (std::size_t i = 0; i < n; ++i)
    if (!pinned[i]) free_nodes.push_back(static_cast<Eigen::Index>(i));
  if (free_nodes.empty()) return out;

  const Eigen::MatrixXd p = dense_routing(spec);
  const Eigen::VectorXd ext = external_vector(spec);
  const auto m = static_cast<Eigen::Index>(free_nodes.size());
  Eigen::MatrixXd p_free(m, m);
  Eigen::VectorXd rhs(m);
  for (Eigen::Index a = 0; a < m; ++a) {
    rhs(a) = ext(free_nodes[a]);
    for (Eigen::Index b = 0; b < m; ++b) p_free(a, b) = p(free_nodes[a], free_nodes[b]);
    // Pinned upstream nodes act as additional external sources.
    for (std::size_t j = 0; j < n; ++j)
      if (pinned[j])
        rhs(a) += p(static_cast<Eigen::Index>(j), free_nodes[a]) *
                  out.rates(static_cast<Eigen::Index>(j));
  }

  const Eigen::VectorXd solved = method == TrafficMethod::Direct
                                     ? solve_traffic_equations(p_free, rhs)
                                     : fixed_point_traffic(p_free, rhs);
  for (Eigen::Index a = 0; a < m; ++a) out.rates(free_nodes[a]) = solved(a);
  return out;
}

}  // namespace qnswap
