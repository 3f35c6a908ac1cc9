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

#include <algorithm>
#include <charconv>
#include <initializer_list>
#include <string>

#include "json.hpp"
#include "qnswap/error.hpp"
#include "qnswap/model.hpp"

namespace qnswap {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

int line_of(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + byte, '\n'));
}

void require_object(const json& j, const std::string& path,
                    std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) fail(ErrorCode::SchemaError, path + " must be an object");
  for (const auto& [key, _] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      fail(ErrorCode::SchemaError, path + "." + key + " is not a recognized key");
  }
}

const json& field(const json& j, const std::string& path, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) fail(ErrorCode::SchemaError, path + "." + key + " is required");
  return *it;
}

// Numbers may be JSON numbers or decimal strings.
double number(const json& j, const std::string& path) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec == std::errc() && ptr == s.data() + s.size()) return value;
  }
  fail(ErrorCode::SchemaError, path + " must be a number");
}

int integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(ErrorCode::SchemaError, path + " must be an integer");
  return j.get<int>();
}

const json& array(const json& j, const std::string& path) {
  if (!j.is_array()) fail(ErrorCode::SchemaError, path + " must be an array");
  return j;
}

std::map<int, double> rate_list(const json& j, const std::string& path,
                                const char* rate_key) {
  std::map<int, double> out;
  std::size_t k = 0;
  for (const json& item : array(j, path)) {
    const std::string at = path + "[" + std::to_string(k++) + "]";
    require_object(item, at, {"node", rate_key});
    const int id = integer(field(item, at, "node"), at + ".node");
    const double rate = number(field(item, at, rate_key), at + "." + rate_key);
    if (!out.emplace(id, rate).second)
      fail(ErrorCode::SchemaError, at + " duplicates node " + std::to_string(id));
  }
  return out;
}

}  // namespace

NetworkSpec parse_network(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    fail(ErrorCode::SyntaxError, "line " + std::to_string(line_of(text, e.byte)) +
                                     ": " + e.what());
  }

  require_object(doc, "$", {"nodes", "routing", "external_arrivals", "known_arrival_rates"});
  NetworkSpec spec;

  const json& nodes = array(field(doc, "$", "nodes"), "nodes");
  if (nodes.empty()) fail(ErrorCode::SchemaError, "nodes");
  std::size_t k = 0;
  for (const json& item : nodes) {
    const std::string at = "nodes[" + std::to_string(k++) + "]";
    require_object(item, at, {"id", "kind", "capacity", "mu", "mu_b", "servers"});
    NodeSpec n;
    n.id = integer(field(item, at, "id"), at + ".id");
    const json& kind = field(item, at, "kind");
    auto parsed = kind.is_string() ? parse_node_kind(kind.get<std::string>()) : std::nullopt;
    if (!parsed) fail(ErrorCode::SchemaError, at + ".kind must be source, sink or intermediate");
    n.kind = *parsed;
    if (item.contains("capacity")) n.capacity = integer(item["capacity"], at + ".capacity");
    n.service_rate = number(field(item, at, "mu"), at + ".mu");
    if (item.contains("mu_b")) n.unblock_rate = number(item["mu_b"], at + ".mu_b");
    if (item.contains("servers")) n.servers = integer(item["servers"], at + ".servers");
    spec.nodes.push_back(n);
  }

  if (doc.contains("routing")) {
    k = 0;
    for (const json& item : array(doc["routing"], "routing")) {
      const std::string at = "routing[" + std::to_string(k++) + "]";
      require_object(item, at, {"from", "to", "p"});
      const int from = integer(field(item, at, "from"), at + ".from");
      const int to = integer(field(item, at, "to"), at + ".to");
      const double p = number(field(item, at, "p"), at + ".p");
      if (!spec.routing.entries.emplace(std::pair{from, to}, p).second)
        fail(ErrorCode::SchemaError, at + " duplicates an earlier entry");
    }
  }

  if (doc.contains("external_arrivals"))
    spec.external_arrivals = rate_list(doc["external_arrivals"], "external_arrivals", "lambda0");
  if (doc.contains("known_arrival_rates"))
    spec.known_arrival_rates =
        rate_list(doc["known_arrival_rates"], "known_arrival_rates", "lambda");

  return validate_network(spec);
}

std::string serialize_network(const NetworkSpec& spec) {
  ordered_json doc;
  ordered_json nodes = ordered_json::array();
  for (const NodeSpec& n : spec.nodes) {
    nodes.push_back({{"id", n.id},
                     {"kind", std::string(to_string(n.kind))},
                     {"capacity", n.capacity},
                     {"mu", n.service_rate},
                     {"mu_b", n.unblock_rate},
                     {"servers", n.servers}});
  }
  doc["nodes"] = std::move(nodes);

  ordered_json routing = ordered_json::array();
  for (const auto& [edge, p] : spec.routing.entries)
    routing.push_back({{"from", edge.first}, {"to", edge.second}, {"p", p}});
  doc["routing"] = std::move(routing);

  ordered_json arrivals = ordered_json::array();
  for (const auto& [id, rate] : spec.external_arrivals)
    arrivals.push_back({{"node", id}, {"lambda0", rate}});
  doc["external_arrivals"] = std::move(arrivals);

  if (spec.known_arrival_rates) {
    ordered_json known = ordered_json::array();
    for (const auto& [id, rate] : *spec.known_arrival_rates)
      known.push_back({{"node", id}, {"lambda", rate}});
    doc["known_arrival_rates"] = std::move(known);
  }
  return doc.dump(2) + "\n";
}

}  // namespace qnswap
