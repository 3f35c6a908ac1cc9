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
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qnswap/model.hpp"

namespace qnswap {

enum class QueueRole { Source, Sink };

struct QueueSite {
  std::string site;
  QueueRole role = QueueRole::Source;
  std::optional<int> capacity;        // falls back to LatticeDefaults
  std::optional<double> arrival_rate;  // sources only

  bool operator==(const QueueSite&) const = default;
};

/// Qubit sites, their undirected nearest-neighbour edges, and the sites
/// that hold boundary queues.
struct LayoutGraph {
  std::vector<std::string> sites;
  std::vector<std::pair<std::string, std::string>> edges;
  std::vector<QueueSite> queues;

  bool operator==(const LayoutGraph&) const = default;
};

struct LatticeDefaults {
  double service_rate = 1.0;
  double unblock_rate = 0.15;
  int boundary_capacity = 8;
  double source_rate = 0.125;
};

/// Intermediate nodes take ids 1..m in site order, then sources, then sinks
/// in queue order. Every node routes uniformly over its adjacent non-source
/// sites; sinks route everything out of the network.
NetworkSpec build_lattice_network(const LayoutGraph& layout, const LatticeDefaults& defaults = {});

LayoutGraph parse_layout(std::string_view text);
std::string serialize_layout(const LayoutGraph& layout);

/// Fifteen-node multiplier network: intermediate nodes 1-11 with the
/// reference per-node rates, sources 12 and 13, sinks 14 and 15. The routing
/// is a reconstruction in which every route out of 12 takes 5 hops and every
/// route out of 13 takes 3.
NetworkSpec munoz15_fixture();
/// Undirected layout with the same adjacency as munoz15_fixture().
LayoutGraph munoz15_layout();

/// Fewest routing transitions from src to dst over p_ij > 0.
int shortest_hops(const NetworkSpec& spec, int src, int dst);

}  // namespace qnswap
