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

// Acceptance checks AC1-AC9. Prints one [PASS]/[FAIL] line per criterion and
// exits non-zero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "reference_values.hpp"
#include "qnswap/cli.hpp"
#include "qnswap/layout.hpp"
#include "qnswap/pfqn.hpp"
#include "qnswap/sim.hpp"
#include "qnswap/traffic.hpp"

using namespace qnswap;
using Clock = std::chrono::steady_clock;

namespace {

struct Verdict {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) detail = what;
    ok = ok && cond;
  }
};

NetworkAnalysis table2_analysis() {
  AnalysisAssumptions a;
  a.blocking_probability_override = reference::kBlockingProbability;
  return analyze_network(munoz15_fixture(), a);
}

std::string fmt(const char* pattern, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, pattern, a, b);
  return buf;
}

Verdict ac1() {
  Verdict v;
  const NetworkAnalysis result = table2_analysis();
  double worst = 0.0;
  for (const auto& row : reference::kTable) {
    const NodeAnalysis& n = result.node(row.node);
    const auto& pi = n.marginal;
    const double errs[] = {std::abs(pi[blocking_state::kIdle] - row.pi00),
                           std::abs(pi[blocking_state::kBusy] - row.pi10),
                           std::abs(pi[blocking_state::kBlocked] - row.pi01),
                           std::abs(n.metrics.utilization - row.rho),
                           std::abs(n.metrics.mean_jobs - row.kbar)};
    for (double e : errs) {
      worst = std::max(worst, e);
      v.require(e <= 0.002, "node " + std::to_string(row.node) + fmt(" off by %.4f", e));
    }
    const double t_err = std::abs(n.metrics.mean_response_time - row.tbar);
    v.require(t_err <= 0.005, "node " + std::to_string(row.node) + fmt(" Tbar off by %.4f", t_err));
  }
  if (v.ok) v.detail = fmt("max probability/metric error %.4f over 11 nodes", worst);
  return v;
}

Verdict ac2() {
  Verdict v;
  const NetworkMetrics net = table2_analysis().network;
  v.require(std::abs(net.external_rate - reference::kExternalRate) <= 1e-12, "external rate");
  v.require(std::abs(net.mean_jobs - reference::kNetworkMeanJobs) <= 0.001, "K");
  v.require(std::abs(net.mean_response_time - reference::kNetworkResponseTime) <= 0.01, "Tbar");
  v.detail = fmt("K = %.6f, Tbar = %.5f", net.mean_jobs, net.mean_response_time) + v.detail;
  return v;
}

Verdict ac3() {
  Verdict v;
  v.require(mm1k_full_probability(1.0, 1) == 0.5, "f(1,1) != 0.5");
  double worst = 0.0;
  for (int k = 1; k <= 10; ++k)
    for (double rho : {1.0 - 1e-8, 1.0 + 1e-8}) {
      const double e = std::abs(mm1k_full_probability(rho, k) - 1.0 / (k + 1));
      worst = std::max(worst, e);
      v.require(e <= 1e-6, "K = " + std::to_string(k));
    }
  if (v.ok) v.detail = fmt("f(1,1) = 0.5, max continuity gap %.2e", worst);
  return v;
}

Verdict ac4() {
  Verdict v;
  std::mt19937_64 rng(20260101);
  std::uniform_real_distribution<double> rate(0.01, 10.0), unblock(0.01, 5.0), prob(0.0, 1.0);
  double worst = 0.0;
  for (int draw = 0; draw < 1000; ++draw) {
    const double lambda = rate(rng), mu = rate(rng), mu_b = unblock(rng), pb = prob(rng);
    const auto closed = blocking_node_closed_form(lambda, mu, mu_b, pb);
    const auto numeric = steady_state(blocking_node_chain(lambda, mu, mu_b, pb));
    for (int s = 0; s < 3; ++s) {
      const double e = std::abs(closed(s) - numeric(s));
      worst = std::max(worst, e);
      v.require(e <= 1e-10, "draw " + std::to_string(draw));
    }
  }
  if (v.ok) v.detail = fmt("1000 draws, max componentwise gap %.2e", worst);
  return v;
}

Verdict ac5() {
  Verdict v;
  std::mt19937_64 rng(5);
  double worst_residual = 0.0, worst_flow = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const NetworkSpec spec = oracle::random_open_network(rng);
    const ArrivalRates rates = solve_traffic(spec);
    const double residual =
        traffic_residual(dense_routing(spec), external_vector(spec), rates.rates);
    double out = 0.0;
    for (std::size_t i = 0; i < spec.size(); ++i)
      out += rates.rates(i) * spec.routing.exit_probability(spec.nodes[i].id);
    const double flow = std::abs(out - total_external_rate(spec));
    worst_residual = std::max(worst_residual, residual);
    worst_flow = std::max(worst_flow, flow);
    v.require(residual <= 1e-10, "residual on trial " + std::to_string(trial));
    v.require(flow <= 1e-9, "conservation on trial " + std::to_string(trial));
  }
  if (v.ok) v.detail = fmt("max residual %.2e, max flow imbalance %.2e", worst_residual, worst_flow);
  return v;
}

Verdict ac6() {
  Verdict v;
  const NetworkAnalysis analysis = table2_analysis();
  std::vector<MarginalDistribution<double>> nodes{analysis.node(1).marginal, analysis.node(5).marginal,
                                                  analysis.node(9).marginal};
  const StateSpace space = StateSpace::blocking_node();
  const auto& labels = space.labels();
  double total = 0.0;
  for (int code = 0; code < 27; ++code) {
    std::vector<std::string> state;
    for (int i = 0, c = code; i < 3; ++i, c /= 3) state.push_back(labels[c % 3]);
    total += joint_probability<double>(nodes, state);
  }
  v.require(std::abs(total - 1.0) <= 1e-12, "");
  v.detail = fmt("sum over 27 joint states = 1 %+.2e", total - 1.0);
  return v;
}

Verdict ac7() {
  Verdict v;
  const NetworkSpec fixture = munoz15_fixture();
  SimConfig cfg;
  cfg.seed = 42;
  cfg.horizon = Horizon::events(1'000'000);
  const auto chain = blocking_node_chain(fixture.known_arrival_rates->at(1), fixture.node(1).service_rate,
                                         fixture.node(1).unblock_rate, 0.5);
  const CtmcSimResult a = simulate_ctmc(chain, cfg);
  const double target[] = {0.1853, 0.1742, 0.6404};
  double worst_a = 0.0;
  for (int s = 0; s < 3; ++s) {
    const double e = std::abs(a.occupancy[s] - target[s]);
    worst_a = std::max(worst_a, e);
    v.require(e <= 0.005, "(a) state " + a.states[s]);
  }

  NetworkSpec queue;
  queue.nodes.push_back({1, NodeKind::Source, 3, 1.0, 0.0, 1});
  queue.external_arrivals[1] = 0.8;
  queue = validate_network(queue);
  SimConfig qcfg;
  qcfg.seed = 42;
  qcfg.horizon = Horizon::time(500'000);
  const NetworkSimResult b = simulate_blocking_network(queue, qcfg);
  const auto exact = mm1k_distribution(0.8, 3);
  double worst_b = 0.0;
  for (int k = 0; k <= 3; ++k) {
    const double e = std::abs(b.nodes[0].occupancy[k] - exact(k));
    worst_b = std::max(worst_b, e);
    v.require(e <= 0.01, "(b) level " + std::to_string(k));
  }
  if (v.ok) v.detail = fmt("(a) max gap %.4f, (b) max gap %.4f", worst_a, worst_b);
  return v;
}

Verdict ac8() {
  Verdict v;
  const NetworkSpec spec = munoz15_fixture();
  std::set<int> lengths;
  for (const NodeSpec& src : spec.nodes) {
    if (src.kind != NodeKind::Source) continue;
    for (const NodeSpec& dst : spec.nodes) {
      if (dst.kind != NodeKind::Sink) continue;
      try {
        lengths.insert(shortest_hops(spec, src.id, dst.id));
      } catch (const Error& e) {
        v.require(e.code() == ErrorCode::Unreachable, e.what());
      }
    }
  }
  v.require(lengths == std::set<int>{3, 5}, "unexpected hop set");
  std::string shown;
  for (int h : lengths) shown += (shown.empty() ? "" : ", ") + std::to_string(h);
  v.detail = "minimum route lengths {" + shown + "}" + (v.ok ? "" : ": " + v.detail);
  return v;
}

std::string invoke(const std::vector<std::string>& args, const std::string& input, int& code) {
  std::istringstream in(input);
  std::ostringstream out, err;
  code = cli::run(args, in, out, err);
  return out.str() + err.str();
}

Verdict ac9() {
  Verdict v;
  int code = 0;
  const std::string fixture = invoke({"fixture", "munoz15", "--emit"}, "", code);
  v.require(code == 0, "fixture emit failed");
  const std::vector<std::vector<std::string>> commands{
      {"analyze", "--network", "-", "--pb", "0.5", "--format", "json"},
      {"analyze", "--network", "-", "--format", "table"},
      {"simulate", "--network", "-", "--seed", "9", "--horizon", "20000", "--reps", "3"},
      {"simulate", "--network", "-", "--seed", "9", "--events", "50000", "--format", "csv"},
  };
  for (const auto& args : commands) {
    int c1 = 0, c2 = 0;
    const std::string first = invoke(args, fixture, c1);
    const std::string second = invoke(args, fixture, c2);
    v.require(c1 == 0 && c2 == 0, args[0] + " failed");
    v.require(first == second, args[0] + " output differs between runs");
  }
  if (v.ok) v.detail = "4 command lines, outputs byte-identical across runs";
  return v;
}

}  // namespace

int main() {
  struct Criterion {
    const char* id;
    const char* title;
    std::function<Verdict()> check;
    double budget_seconds;
  };
  const Criterion criteria[] = {
      {"AC1", "reference node table reproduced", ac1, 1.0},
      {"AC2", "network K and Tbar", ac2, 1.0},
      {"AC3", "M/M/1/K unit-load limit", ac3, 0.0},
      {"AC4", "closed form vs generator solve", ac4, 5.0},
      {"AC5", "traffic equations on random networks", ac5, 0.0},
      {"AC6", "product-form normalization", ac6, 0.0},
      {"AC7", "simulation vs analytics", ac7, 60.0},
      {"AC8", "fixture hop structure", ac8, 0.0},
      {"AC9", "determinism", ac9, 0.0},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = Clock::now();
    Verdict v;
    try {
      v = c.check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
    if (c.budget_seconds > 0.0 && seconds >= c.budget_seconds) {
      v.ok = false;
      v.detail += fmt(" (took %.2f s, budget %.0f s)", seconds, c.budget_seconds);
    }
    std::printf("[%s] %s %s: %s (%.3f s)\n", v.ok ? "PASS" : "FAIL", c.id, c.title, v.detail.c_str(),
                seconds);
    failures += !v.ok;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(std::size(criteria)) - failures,
              std::size(criteria));
  return failures == 0 ? 0 : 1;
}
