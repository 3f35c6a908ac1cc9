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

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qnswap {

/// Tolerance for stochasticity checks on routing rows.
inline constexpr double kStochasticEps = 1e-9;

enum class NodeKind { Source, Sink, Intermediate };

std::string_view to_string(NodeKind kind) noexcept;
std::optional<NodeKind> parse_node_kind(std::string_view text) noexcept;

/// One single-server station. Rates are in jobs per unit time.
struct NodeSpec {
  int id = 0;
  NodeKind kind = NodeKind::Intermediate;
  int capacity = 1;
  double service_rate = 1.0;
  double unblock_rate = 0.0;
  int servers = 1;

  bool operator==(const NodeSpec&) const = default;
};

/// Sparse routing probabilities p_ij. Exit probabilities p_i0 are cached by
/// validate_network; before that they are derived from the row sums.
struct RoutingMatrix {
  std::map<std::pair<int, int>, double> entries;
  std::map<int, double> exits;

  double probability(int from, int to) const;
  double row_sum(int from) const;
  double exit_probability(int from) const;
  /// Outgoing (to, p) pairs of `from`, ascending by destination id.
  std::vector<std::pair<int, double>> row(int from) const;

  bool operator==(const RoutingMatrix&) const = default;
};

struct NetworkSpec {
  std::vector<NodeSpec> nodes;
  RoutingMatrix routing;
  std::map<int, double> external_arrivals;
  std::optional<std::map<int, double>> known_arrival_rates;

  std::size_t size() const noexcept { return nodes.size(); }
  bool contains(int id) const noexcept;
  std::size_t index_of(int id) const;
  const NodeSpec& node(int id) const;
  double external_rate(int id) const noexcept;

  bool operator==(const NetworkSpec&) const = default;
};

/// Checks every structural invariant and returns a copy with p_i0
/// materialized. Throws qnswap::Error on the first violation.
NetworkSpec validate_network(const NetworkSpec& spec);

/// Parses a network description document (JSON) and validates it.
NetworkSpec parse_network(std::string_view text);

/// Serializes to the network description format. Stable output.
std::string serialize_network(const NetworkSpec& spec);

}  // namespace qnswap
