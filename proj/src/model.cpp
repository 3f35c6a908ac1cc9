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

#include "qnswap/model.hpp"

#include <algorithm>
#include <limits>
#include <set>

#include "qnswap/error.hpp"

namespace qnswap {

std::string_view to_string(NodeKind kind) noexcept {
  switch (kind) {
    case NodeKind::Source: return "source";
    case NodeKind::Sink: return "sink";
    case NodeKind::Intermediate: return "intermediate";
  }
  return "intermediate";
}

std::optional<NodeKind> parse_node_kind(std::string_view text) noexcept {
  if (text == "source") return NodeKind::Source;
  if (text == "sink") return NodeKind::Sink;
  if (text == "intermediate") return NodeKind::Intermediate;
  return std::nullopt;
}

double RoutingMatrix::probability(int from, int to) const {
  auto it = entries.find({from, to});
  return it == entries.end() ? 0.0 : it->second;
}

double RoutingMatrix::row_sum(int from) const {
  double sum = 0.0;
  for (auto it = entries.lower_bound({from, std::numeric_limits<int>::min()});
       it != entries.end() && it->first.first == from; ++it)
    sum += it->second;
  return sum;
}

double RoutingMatrix::exit_probability(int from) const {
  if (auto it = exits.find(from); it != exits.end()) return it->second;
  return std::clamp(1.0 - row_sum(from), 0.0, 1.0);
}

std::vector<std::pair<int, double>> RoutingMatrix::row(int from) const {
  std::vector<std::pair<int, double>> out;
  for (auto it = entries.lower_bound({from, std::numeric_limits<int>::min()});
       it != entries.end() && it->first.first == from; ++it)
    out.emplace_back(it->first.second, it->second);
  return out;
}

bool NetworkSpec::contains(int id) const noexcept {
  return std::any_of(nodes.begin(), nodes.end(),
                     [id](const NodeSpec& n) { return n.id == id; });
}

std::size_t NetworkSpec::index_of(int id) const {
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].id == id) return i;
  fail(ErrorCode::UnknownNodeReference, "node " + std::to_string(id));
}

const NodeSpec& NetworkSpec::node(int id) const { return nodes[index_of(id)]; }

double NetworkSpec::external_rate(int id) const noexcept {
  auto it = external_arrivals.find(id);
  return it == external_arrivals.end() ? 0.0 : it->second;
}

namespace {

void check_rate(double value, const char* field, int id) {
  // NaN fails this comparison as well.
  if (!(value >= 0.0))
    fail(ErrorCode::NegativeRate,
         std::string(field) + " of node " + std::to_string(id));
}

}  // namespace

NetworkSpec validate_network(const NetworkSpec& spec) {
  if (spec.nodes.empty()) fail(ErrorCode::SchemaError, "nodes");

  std::set<int> ids;
  for (const NodeSpec& n : spec.nodes) {
    if (n.id <= 0)
      fail(ErrorCode::SchemaError, "node id must be positive: " + std::to_string(n.id));
    if (!ids.insert(n.id).second)
      fail(ErrorCode::SchemaError, "duplicate node id " + std::to_string(n.id));
    const std::string tag = "node " + std::to_string(n.id);
    if (n.capacity < 1) fail(ErrorCode::SchemaError, tag + " capacity must be >= 1");
    if (n.servers != 1) fail(ErrorCode::SchemaError, tag + " servers must be 1");
    if (n.kind == NodeKind::Intermediate && n.capacity != 1)
      fail(ErrorCode::SchemaError, tag + " intermediate capacity must be 1");
    check_rate(n.service_rate, "mu", n.id);
    check_rate(n.unblock_rate, "mu_b", n.id);
    if (n.service_rate == 0.0) fail(ErrorCode::ZeroRate, "mu of " + tag);
    if (n.kind == NodeKind::Intermediate && n.unblock_rate == 0.0)
      fail(ErrorCode::ZeroRate, "mu_b of " + tag);
  }

  for (const auto& [edge, p] : spec.routing.entries) {
    const auto [from, to] = edge;
    if (!ids.contains(from) || !ids.contains(to))
      fail(ErrorCode::UnknownNodeReference,
           "routing " + std::to_string(from) + "->" + std::to_string(to));
    if (!(p >= 0.0))
      fail(ErrorCode::ProbabilityOutOfRange,
           "p(" + std::to_string(from) + "," + std::to_string(to) + ")");
  }

  NetworkSpec out = spec;
  out.routing.exits.clear();
  bool has_exit = false;
  for (const NodeSpec& n : spec.nodes) {
    const double sum = spec.routing.row_sum(n.id);
    if (sum > 1.0 + kStochasticEps)
      fail(ErrorCode::RowSumExceedsOne,
           "node " + std::to_string(n.id) + " row sums to " + std::to_string(sum));
    if (n.kind == NodeKind::Sink && sum != 0.0)
      fail(ErrorCode::SchemaError,
           "sink " + std::to_string(n.id) + " must not route to other nodes");
    const double exit = std::clamp(1.0 - sum, 0.0, 1.0);
    out.routing.exits[n.id] = exit;
    has_exit = has_exit || exit > kStochasticEps;
  }

  bool has_arrival = false;
  for (const auto& [id, rate] : spec.external_arrivals) {
    if (!ids.contains(id))
      fail(ErrorCode::UnknownNodeReference, "external arrival at " + std::to_string(id));
    check_rate(rate, "lambda0", id);
    if (spec.node(id).kind == NodeKind::Sink)
      fail(ErrorCode::SchemaError,
           "external arrivals cannot target sink " + std::to_string(id));
    has_arrival = has_arrival || rate > 0.0;
  }
  if (!has_arrival) fail(ErrorCode::ClosedNetwork, "no external arrivals");
  if (!has_exit) fail(ErrorCode::ClosedNetwork, "no node routes outside the network");

  if (spec.known_arrival_rates) {
    for (const auto& [id, rate] : *spec.known_arrival_rates) {
      if (!ids.contains(id))
        fail(ErrorCode::UnknownNodeReference, "known arrival rate for " + std::to_string(id));
      check_rate(rate, "lambda", id);
    }
    for (const NodeSpec& n : spec.nodes)
      if (n.kind == NodeKind::Intermediate && !spec.known_arrival_rates->contains(n.id))
        fail(ErrorCode::SchemaError,
             "known_arrival_rates must cover intermediate node " + std::to_string(n.id));
  }
  return out;
}

}  // namespace qnswap
