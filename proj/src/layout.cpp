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

#include "qnswap/layout.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

#include "json.hpp"
#include "qnswap/error.hpp"

namespace qnswap {

namespace {

using json = nlohmann::json;

struct Edge {
  int from;
  int to;
};

// Directed reconstruction of the multiplier network.
constexpr Edge kMunozEdges[] = {
    {12, 1}, {12, 5}, {1, 2},  {5, 2},  {5, 6},  {2, 3},  {6, 3},  {6, 7},  {3, 4},
    {7, 4},  {7, 11}, {4, 14}, {13, 8}, {13, 9}, {8, 10}, {9, 10}, {9, 11}, {10, 15},
    {11, 15},
};

constexpr double kMunozArrival[] = {0.94, 0.94, 0.936, 0.88, 1.644, 1.596,
                                    1.02, 1.6,  1.18,  1.42, 0.86};
constexpr double kMunozUnblock[] = {0.136, 0.136, 0.13,  0.144, 0.17, 0.142,
                                    0.124, 0.173, 0.175, 0.195, 0.143};

constexpr int kMunozBoundaryCapacity = 8;

// p = 1/d for all but the last destination, which takes the complement so
// that the row sums to exactly one.
void set_uniform_row(RoutingMatrix& routing, int from, std::vector<int> targets) {
  std::sort(targets.begin(), targets.end());
  const double share = 1.0 / static_cast<double>(targets.size());
  double partial = 0.0;
  for (std::size_t k = 0; k < targets.size(); ++k) {
    const double p = k + 1 == targets.size() ? 1.0 - partial : share;
    routing.entries[{from, targets[k]}] = p;
    partial += p;
  }
}

std::string site_label(const json& j, const std::string& path) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<long long>());
  fail(ErrorCode::SchemaError, path + " must be a string or integer label");
}

}  // namespace

NetworkSpec build_lattice_network(const LayoutGraph& layout, const LatticeDefaults& defaults) {
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < layout.sites.size(); ++i)
    if (!index.emplace(layout.sites[i], i).second)
      fail(ErrorCode::SchemaError, "duplicate site " + layout.sites[i]);
  if (layout.sites.empty()) fail(ErrorCode::SchemaError, "sites");

  const std::size_t n = layout.sites.size();
  std::vector<std::set<std::size_t>> adjacent(n);
  for (const auto& [a, b] : layout.edges) {
    auto ia = index.find(a), ib = index.find(b);
    if (ia == index.end() || ib == index.end())
      fail(ErrorCode::SchemaError, "edge references unknown site " + (ia == index.end() ? a : b));
    if (ia->second == ib->second) fail(ErrorCode::SchemaError, "self edge on site " + a);
    adjacent[ia->second].insert(ib->second);
    adjacent[ib->second].insert(ia->second);
  }

  std::vector<const QueueSite*> queue_of(n, nullptr);
  bool has_source = false, has_sink = false;
  for (const QueueSite& q : layout.queues) {
    auto it = index.find(q.site);
    if (it == index.end()) fail(ErrorCode::SchemaError, "queue on unknown site " + q.site);
    if (queue_of[it->second]) fail(ErrorCode::SchemaError, "two queues on site " + q.site);
    queue_of[it->second] = &q;
    has_source = has_source || q.role == QueueRole::Source;
    has_sink = has_sink || q.role == QueueRole::Sink;
  }
  if (!has_source) fail(ErrorCode::NoSource, "layout has no source queue");
  if (!has_sink) fail(ErrorCode::NoSink, "layout has no sink queue");

  std::vector<bool> seen(n, false);
  std::deque<std::size_t> frontier{0};
  seen[0] = true;
  std::size_t reached = 1;
  while (!frontier.empty()) {
    const std::size_t s = frontier.front();
    frontier.pop_front();
    for (std::size_t t : adjacent[s])
      if (!seen[t]) {
        seen[t] = true;
        ++reached;
        frontier.push_back(t);
      }
  }
  if (reached != n) fail(ErrorCode::DisconnectedLayout, "layout graph is not connected");

  std::vector<int> id_of(n, 0);
  int next_id = 1;
  for (std::size_t s = 0; s < n; ++s)
    if (!queue_of[s]) id_of[s] = next_id++;
  for (QueueRole role : {QueueRole::Source, QueueRole::Sink})
    for (const QueueSite& q : layout.queues)
      if (q.role == role) id_of[index.at(q.site)] = next_id++;

  NetworkSpec spec;
  for (std::size_t s = 0; s < n; ++s) {
    NodeSpec node;
    node.id = id_of[s];
    node.service_rate = defaults.service_rate;
    if (const QueueSite* q = queue_of[s]) {
      node.kind = q->role == QueueRole::Source ? NodeKind::Source : NodeKind::Sink;
      node.capacity = q->capacity.value_or(defaults.boundary_capacity);
      if (q->role == QueueRole::Source)
        spec.external_arrivals[node.id] = q->arrival_rate.value_or(defaults.source_rate);
    } else {
      node.kind = NodeKind::Intermediate;
      node.capacity = 1;
      node.unblock_rate = defaults.unblock_rate;
    }
    spec.nodes.push_back(node);
  }
  std::sort(spec.nodes.begin(), spec.nodes.end(),
            [](const NodeSpec& a, const NodeSpec& b) { return a.id < b.id; });

  for (std::size_t s = 0; s < n; ++s) {
    if (queue_of[s] && queue_of[s]->role == QueueRole::Sink) continue;
    std::vector<int> targets;
    for (std::size_t t : adjacent[s])
      if (!queue_of[t] || queue_of[t]->role != QueueRole::Source) targets.push_back(id_of[t]);
    if (!targets.empty()) set_uniform_row(spec.routing, id_of[s], std::move(targets));
  }
  return validate_network(spec);
}

LayoutGraph parse_layout(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const auto byte = std::min<std::size_t>(e.byte, text.size());
    const int line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + byte, '\n'));
    fail(ErrorCode::SyntaxError, "line " + std::to_string(line) + ": " + e.what());
  }
  if (!doc.is_object()) fail(ErrorCode::SchemaError, "$ must be an object");
  for (const auto& [key, _] : doc.items())
    if (key != "sites" && key != "edges" && key != "queues")
      fail(ErrorCode::SchemaError, "$." + key + " is not a recognized key");

  LayoutGraph layout;
  if (!doc.contains("sites") || !doc["sites"].is_array())
    fail(ErrorCode::SchemaError, "sites must be an array");
  for (std::size_t k = 0; k < doc["sites"].size(); ++k)
    layout.sites.push_back(site_label(doc["sites"][k], "sites[" + std::to_string(k) + "]"));

  if (doc.contains("edges")) {
    if (!doc["edges"].is_array()) fail(ErrorCode::SchemaError, "edges must be an array");
    for (std::size_t k = 0; k < doc["edges"].size(); ++k) {
      const json& e = doc["edges"][k];
      const std::string at = "edges[" + std::to_string(k) + "]";
      if (!e.is_array() || e.size() != 2) fail(ErrorCode::SchemaError, at + " must be a pair");
      layout.edges.emplace_back(site_label(e[0], at), site_label(e[1], at));
    }
  }

  if (!doc.contains("queues") || !doc["queues"].is_array())
    fail(ErrorCode::SchemaError, "queues must be an array");
  for (std::size_t k = 0; k < doc["queues"].size(); ++k) {
    const json& q = doc["queues"][k];
    const std::string at = "queues[" + std::to_string(k) + "]";
    if (!q.is_object()) fail(ErrorCode::SchemaError, at + " must be an object");
    for (const auto& [key, _] : q.items())
      if (key != "site" && key != "role" && key != "capacity" && key != "lambda0")
        fail(ErrorCode::SchemaError, at + "." + key + " is not a recognized key");
    if (!q.contains("site") || !q.contains("role"))
      fail(ErrorCode::SchemaError, at + " needs site and role");
    QueueSite site;
    site.site = site_label(q["site"], at + ".site");
    const std::string role = q["role"].is_string() ? q["role"].get<std::string>() : "";
    if (role == "source")
      site.role = QueueRole::Source;
    else if (role == "sink")
      site.role = QueueRole::Sink;
    else
      fail(ErrorCode::SchemaError, at + ".role must be source or sink");
    if (q.contains("capacity")) {
      if (!q["capacity"].is_number_integer())
        fail(ErrorCode::SchemaError, at + ".capacity must be an integer");
      site.capacity = q["capacity"].get<int>();
    }
    if (q.contains("lambda0")) {
      if (!q["lambda0"].is_number()) fail(ErrorCode::SchemaError, at + ".lambda0 must be a number");
      site.arrival_rate = q["lambda0"].get<double>();
    }
    layout.queues.push_back(site);
  }
  return layout;
}

std::string serialize_layout(const LayoutGraph& layout) {
  nlohmann::ordered_json doc;
  doc["sites"] = layout.sites;
  auto edges = nlohmann::ordered_json::array();
  for (const auto& [a, b] : layout.edges) edges.push_back({a, b});
  doc["edges"] = std::move(edges);
  auto queues = nlohmann::ordered_json::array();
  for (const QueueSite& q : layout.queues) {
    nlohmann::ordered_json item{{"site", q.site},
                                {"role", q.role == QueueRole::Source ? "source" : "sink"}};
    if (q.capacity) item["capacity"] = *q.capacity;
    if (q.arrival_rate) item["lambda0"] = *q.arrival_rate;
    queues.push_back(std::move(item));
  }
  doc["queues"] = std::move(queues);
  return doc.dump(2) + "\n";
}

NetworkSpec munoz15_fixture() {
  NetworkSpec spec;
  std::map<int, double> known;
  for (int id = 1; id <= 11; ++id) {
    spec.nodes.push_back({id, NodeKind::Intermediate, 1, 1.0, kMunozUnblock[id - 1], 1});
    known[id] = kMunozArrival[id - 1];
  }
  spec.nodes.push_back({12, NodeKind::Source, kMunozBoundaryCapacity, 1.0, 0.0, 1});
  spec.nodes.push_back({13, NodeKind::Source, kMunozBoundaryCapacity, 1.0, 0.0, 1});
  spec.nodes.push_back({14, NodeKind::Sink, kMunozBoundaryCapacity, 1.0, 0.0, 1});
  spec.nodes.push_back({15, NodeKind::Sink, kMunozBoundaryCapacity, 1.0, 0.0, 1});

  std::map<int, std::vector<int>> out;
  for (const Edge& e : kMunozEdges) out[e.from].push_back(e.to);
  for (auto& [from, targets] : out) set_uniform_row(spec.routing, from, std::move(targets));

  spec.external_arrivals = {{12, 0.15}, {13, 0.1}};
  spec.known_arrival_rates = std::move(known);
  return validate_network(spec);
}

LayoutGraph munoz15_layout() {
  LayoutGraph layout;
  for (int id = 1; id <= 15; ++id) layout.sites.push_back(std::to_string(id));
  for (const Edge& e : kMunozEdges)
    layout.edges.emplace_back(std::to_string(e.from), std::to_string(e.to));
  layout.queues = {{"12", QueueRole::Source, kMunozBoundaryCapacity, 0.15},
                   {"13", QueueRole::Source, kMunozBoundaryCapacity, 0.1},
                   {"14", QueueRole::Sink, kMunozBoundaryCapacity, std::nullopt},
                   {"15", QueueRole::Sink, kMunozBoundaryCapacity, std::nullopt}};
  return layout;
}

int shortest_hops(const NetworkSpec& spec, int src, int dst) {
  if (!spec.contains(src)) fail(ErrorCode::UnknownNodeReference, "node " + std::to_string(src));
  if (!spec.contains(dst)) fail(ErrorCode::UnknownNodeReference, "node " + std::to_string(dst));
  std::map<int, int> hops{{src, 0}};
  std::deque<int> frontier{src};
  while (!frontier.empty()) {
    const int at = frontier.front();
    frontier.pop_front();
    if (at == dst) return hops[at];
    for (const auto& [to, p] : spec.routing.row(at))
      if (p > 0.0 && hops.emplace(to, hops[at] + 1).second) frontier.push_back(to);
  }
  fail(ErrorCode::Unreachable, std::to_string(src) + " -> " + std::to_string(dst));
}

}  // namespace qnswap
