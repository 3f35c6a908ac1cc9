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

#include <random>

#include "doctest.h"
#include "reference_values.hpp"
#include "qnswap/error.hpp"
#include "qnswap/layout.hpp"
#include "qnswap/pfqn.hpp"

using namespace qnswap;
using namespace qnswap::blocking_state;

namespace {

NetworkSpec star(int center_targets, int neighbour_capacity, NodeKind neighbour_kind) {
  NetworkSpec spec;
  spec.nodes.push_back({1, NodeKind::Intermediate, 1, 1.0, 0.2, 1});
  for (int j = 0; j < center_targets; ++j) {
    const int id = 2 + j;
    spec.nodes.push_back({id, neighbour_kind, neighbour_capacity, 1.0, 0.2, 1});
    spec.routing.entries[{1, id}] = 1.0 / center_targets;
  }
  spec.external_arrivals[1] = 0.5;
  std::map<int, double> rates;
  for (const NodeSpec& n : spec.nodes)
    if (n.kind == NodeKind::Intermediate) rates[n.id] = 0.5;
  spec.known_arrival_rates = rates;
  return validate_network(spec);
}

MarginalDistribution<double> marginal(double a, double b, double c) {
  return MarginalDistribution<double>(StateSpace::blocking_node(), Eigen::Vector3d(a, b, c));
}

}  // namespace

TEST_CASE("worst-case blocking probability") {
  SUBCASE("full routing onto capacity-one neighbours gives one half") {
    for (int targets : {1, 2, 4})
      CHECK(worst_case_blocking_probability(star(targets, 1, NodeKind::Intermediate), 1) == 0.5);
  }
  SUBCASE("direct exit gives zero") {
    CHECK(worst_case_blocking_probability(star(0, 1, NodeKind::Intermediate), 1) == 0.0);
  }
  SUBCASE("one neighbour of capacity three") {
    CHECK(worst_case_blocking_probability(star(1, 3, NodeKind::Sink), 1) == 0.25);
  }
  SUBCASE("override is returned verbatim") {
    AnalysisAssumptions a;
    a.blocking_probability_override = 0.37;
    CHECK(worst_case_blocking_probability(star(2, 1, NodeKind::Intermediate), 1, a) == 0.37);
    a.blocking_probability_override = 1.2;
    CHECK_THROWS_WITH_AS(worst_case_blocking_probability(star(2, 1, NodeKind::Intermediate), 1, a),
                         doctest::Contains("ProbabilityOutOfRange"), Error);
  }
  SUBCASE("boundary nodes are not eligible") {
    CHECK_THROWS_WITH_AS(worst_case_blocking_probability(munoz15_fixture(), 12),
                         doctest::Contains("NodeNotIntermediate"), Error);
  }
  SUBCASE("without rho_one the neighbour load sets fullness") {
    AnalysisAssumptions a;
    a.rho_one = false;
    // Neighbour 2 is fed at 0.5 with mu = 1: full with probability 0.5/1.5.
    const NetworkSpec spec = star(1, 1, NodeKind::Intermediate);
    CHECK(worst_case_blocking_probability(spec, 1, a) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  }
}

TEST_CASE("fixture rows routing everything inward yield exactly one half") {
  const NetworkSpec spec = munoz15_fixture();
  for (int id = 1; id <= 11; ++id) {
    bool all_intermediate = true;
    for (const auto& [to, p] : spec.routing.row(id))
      all_intermediate = all_intermediate && spec.node(to).kind == NodeKind::Intermediate;
    if (all_intermediate) CHECK(worst_case_blocking_probability(spec, id) == 0.5);
  }
}

TEST_CASE("reference table is reproduced with P_b = 0.5") {
  AnalysisAssumptions a;
  a.blocking_probability_override = reference::kBlockingProbability;
  const NetworkAnalysis result = analyze_network(munoz15_fixture(), a);
  REQUIRE(result.nodes.size() == 11);
  for (const auto& row : reference::kTable) {
    const NodeAnalysis& n = result.node(row.node);
    CHECK(std::abs(n.marginal[kIdle] - row.pi00) <= 0.002);
    CHECK(std::abs(n.marginal[kBusy] - row.pi10) <= 0.002);
    CHECK(std::abs(n.marginal[kBlocked] - row.pi01) <= 0.002);
    CHECK(std::abs(n.metrics.utilization - row.rho) <= 0.002);
    CHECK(std::abs(n.metrics.mean_jobs - row.kbar) <= 0.002);
    CHECK(std::abs(n.metrics.mean_response_time - row.tbar) <= 0.005);
  }
  CHECK(std::abs(result.network.mean_jobs - reference::kNetworkMeanJobs) <= 0.001);
  CHECK(std::abs(result.network.mean_response_time - reference::kNetworkResponseTime) <= 0.01);
  CHECK(result.network.external_rate == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("single intermediate node at unit load") {
  NetworkSpec spec;
  spec.nodes.push_back({1, NodeKind::Intermediate, 1, 1.0, 0.3, 1});
  spec.external_arrivals[1] = 1.0;
  const NetworkAnalysis result = analyze_network(validate_network(spec));
  const NodeAnalysis& n = result.node(1);
  CHECK(n.blocking_probability == 0.0);
  CHECK(n.marginal[kIdle] == 0.5);
  CHECK(n.marginal[kBusy] == 0.5);
  CHECK(n.marginal[kBlocked] == 0.0);
  CHECK(n.metrics.utilization == 0.5);
}

TEST_CASE("analysis is deterministic and leaves its input alone") {
  const NetworkSpec spec = munoz15_fixture();
  const NetworkSpec copy = spec;
  const auto a = analyze_network(spec);
  const auto b = analyze_network(spec);
  CHECK(spec == copy);
  REQUIRE(a.nodes.size() == b.nodes.size());
  for (std::size_t i = 0; i < a.nodes.size(); ++i) {
    CHECK(a.nodes[i].marginal == b.nodes[i].marginal);
    CHECK(a.nodes[i].metrics == b.nodes[i].metrics);
    CHECK(a.nodes[i].blocking_probability == b.nodes[i].blocking_probability);
  }
  CHECK(a.network == b.network);
}

TEST_CASE("analysis derives rates from routing when none are given") {
  NetworkSpec spec;
  spec.nodes.push_back({1, NodeKind::Source, 4, 1.0, 0.0, 1});
  spec.nodes.push_back({2, NodeKind::Intermediate, 1, 2.0, 0.4, 1});
  spec.nodes.push_back({3, NodeKind::Sink, 4, 1.0, 0.0, 1});
  spec.routing.entries[{1, 2}] = 1.0;
  spec.routing.entries[{2, 3}] = 1.0;
  spec.external_arrivals[1] = 0.3;
  const auto result = analyze_network(validate_network(spec));
  const NodeAnalysis& n = result.node(2);
  CHECK(n.arrival_rate == doctest::Approx(0.3));
  CHECK(n.blocking_probability == doctest::Approx(0.2));  // 1 / (4 + 1)
  const auto expected = blocking_node_closed_form(0.3, 2.0, 0.4, 0.2);
  CHECK(n.marginal == expected);
  CHECK(result.network.subset == std::vector<int>{2});
}

TEST_CASE("subset selection and missing unblocking rate") {
  const auto one = analyze_network(munoz15_fixture(), {}, std::vector<int>{1, 2});
  CHECK(one.network.subset == std::vector<int>{1, 2});
  CHECK(one.network.mean_jobs == doctest::Approx(one.node(1).metrics.mean_jobs));

  NetworkSpec spec = munoz15_fixture();
  spec.nodes[0].unblock_rate = 0.0;  // bypasses validation on purpose
  CHECK_THROWS_WITH_AS(analyze_network(spec), doctest::Contains("MissingUnblockRate"), Error);
}

TEST_CASE("joint probability is the product of marginals") {
  const std::vector<MarginalDistribution<double>> nodes{
      marginal(0.185, 0.174, 0.641), marginal(0.185, 0.174, 0.641), marginal(0.181, 0.169, 0.650)};
  const std::vector<std::string> one{std::string(kBlocked)};
  CHECK(joint_probability<double>(std::span(nodes).first(1), one) == 0.641);
  const std::vector<std::string> two{std::string(kBlocked), std::string(kBlocked)};
  CHECK(joint_probability<double>(std::span(nodes).first(2), two) ==
        doctest::Approx(0.641 * 0.641).epsilon(1e-15));
  const std::vector<std::string> idle(3, std::string(kIdle));
  CHECK(joint_probability<double>(nodes, idle) == doctest::Approx(0.00619).epsilon(0.001));

  CHECK_THROWS_WITH_AS(joint_probability<double>(nodes, two), doctest::Contains("DimensionMismatch"),
                       Error);
  const std::vector<std::string> unknown{"(1,1)", std::string(kIdle), std::string(kIdle)};
  CHECK_THROWS_WITH_AS(joint_probability<double>(nodes, unknown), doctest::Contains("UnknownState"),
                       Error);
}

TEST_CASE("joint probabilities sum to one over the product space") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> rate(0.1, 3.0), unblock(0.05, 1.0), prob(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<MarginalDistribution<double>> nodes;
    for (int i = 0; i < 4; ++i)
      nodes.push_back(blocking_node_closed_form(rate(rng), rate(rng), unblock(rng), prob(rng)));
    const auto& labels = nodes[0].states().labels();
    double total = 0.0;
    for (int code = 0; code < 81; ++code) {
      std::vector<std::string> state;
      for (int i = 0, c = code; i < 4; ++i, c /= 3) state.push_back(labels[c % 3]);
      total += joint_probability<double>(nodes, state);
    }
    CHECK(std::abs(total - 1.0) <= 1e-12);
  }
}
