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

#include "qnswap/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "json.hpp"

namespace qnswap {

namespace {

using json = nlohmann::json;

double rounded(double value, const Formatting& fmt) {
  if (!fmt.round_decimals) return value;
  const double scale = std::pow(10.0, *fmt.round_decimals);
  return std::round(value * scale) / scale;
}

json swap_json(const SwapDepthReport& r, const Formatting& fmt) {
  return {{"predicted_response_time", rounded(r.predicted_response_time, fmt)},
          {"observed_depth", r.observed_depth},
          {"absolute_gap", rounded(r.absolute_gap, fmt)},
          {"relative_gap", rounded(r.relative_gap, fmt)},
          {"hop_min", r.hop_bounds.min},
          {"hop_max", r.hop_bounds.max},
          {"within_hop_bounds", r.within_hop_bounds}};
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

}  // namespace

std::string format_number(double value, const Formatting& fmt) {
  char buf[64];
  if (fmt.round_decimals)
    std::snprintf(buf, sizeof buf, "%.*f", *fmt.round_decimals, value);
  else
    std::snprintf(buf, sizeof buf, "%.6g", value);
  return buf;
}

std::string analysis_json(const NetworkAnalysis& analysis, const Formatting& fmt,
                          const std::optional<SwapDepthReport>& swap) {
  using namespace blocking_state;
  json doc;
  doc["assumptions"] = {
      {"rho_one", analysis.assumptions.rho_one},
      {"pb_override", analysis.assumptions.blocking_probability_override
                          ? json(*analysis.assumptions.blocking_probability_override)
                          : json(nullptr)},
      {"normalization_constant", AnalysisAssumptions::normalization_constant}};
  json nodes = json::array();
  for (const NodeAnalysis& n : analysis.nodes) {
    nodes.push_back({{"node", n.node},
                     {"lambda", rounded(n.arrival_rate, fmt)},
                     {"pb", rounded(n.blocking_probability, fmt)},
                     {"pi00", rounded(n.marginal[kIdle], fmt)},
                     {"pi10", rounded(n.marginal[kBusy], fmt)},
                     {"pi01", rounded(n.marginal[kBlocked], fmt)},
                     {"rho", rounded(n.metrics.utilization, fmt)},
                     {"kbar", rounded(n.metrics.mean_jobs, fmt)},
                     {"tbar", rounded(n.metrics.mean_response_time, fmt)}});
  }
  doc["nodes"] = std::move(nodes);
  const NetworkMetrics& net = analysis.network;
  doc["network"] = {{"external_rate", rounded(net.external_rate, fmt)},
                    {"mean_jobs", rounded(net.mean_jobs, fmt)},
                    {"mean_response_time", rounded(net.mean_response_time, fmt)},
                    {"total_jobs", rounded(net.total_jobs, fmt)},
                    {"subset", net.subset}};
  if (swap) doc["swap_depth"] = swap_json(*swap, fmt);
  return doc.dump(2) + "\n";
}

std::string analysis_csv(const NetworkAnalysis& analysis, const Formatting& fmt) {
  using namespace blocking_state;
  std::ostringstream os;
  os << "node,pi00,pi10,pi01,rho,kbar,tbar\n";
  for (const NodeAnalysis& n : analysis.nodes) {
    os << n.node << ',' << format_number(n.marginal[kIdle], fmt) << ','
       << format_number(n.marginal[kBusy], fmt) << ',' << format_number(n.marginal[kBlocked], fmt)
       << ',' << format_number(n.metrics.utilization, fmt) << ','
       << format_number(n.metrics.mean_jobs, fmt) << ','
       << format_number(n.metrics.mean_response_time, fmt) << '\n';
  }
  return os.str();
}

std::string analysis_table(const NetworkAnalysis& analysis, const Formatting& fmt,
                           const std::optional<SwapDepthReport>& swap) {
  using namespace blocking_state;
  constexpr std::size_t w = 10;
  std::ostringstream os;
  for (const char* h : {"node", "lambda", "P_b", "pi(0,0)", "pi(1,0)", "pi(0,1)", "rho", "Kbar",
                        "Tbar"})
    os << pad(h, w);
  os << '\n';
  for (const NodeAnalysis& n : analysis.nodes) {
    os << pad(std::to_string(n.node), w);
    for (double v : {n.arrival_rate, n.blocking_probability, n.marginal[kIdle], n.marginal[kBusy],
                     n.marginal[kBlocked], n.metrics.utilization, n.metrics.mean_jobs,
                     n.metrics.mean_response_time})
      os << pad(format_number(v, fmt), w);
    os << '\n';
  }
  const NetworkMetrics& net = analysis.network;
  os << '\n'
     << "lambda (external)  " << format_number(net.external_rate, fmt) << '\n'
     << "K (mean of Kbar)   " << format_number(net.mean_jobs, fmt) << '\n'
     << "Tbar = K/lambda    " << format_number(net.mean_response_time, fmt) << '\n'
     << "sum of Kbar        " << format_number(net.total_jobs, fmt) << '\n';
  if (swap) {
    os << "observed depth     " << swap->observed_depth << '\n'
       << "gap                " << format_number(swap->absolute_gap, fmt) << '\n'
       << "hop bounds         [" << swap->hop_bounds.min << ", " << swap->hop_bounds.max << "] "
       << (swap->within_hop_bounds ? "contains" : "excludes") << " Tbar\n";
  }
  return os.str();
}

std::string ctmc_sim_json(const CtmcSimResult& result, const Formatting& fmt) {
  json states = json::array();
  for (Eigen::Index i = 0; i < result.occupancy.size(); ++i)
    states.push_back({{"state", result.states[static_cast<std::size_t>(i)]},
                      {"occupancy", rounded(result.occupancy(i), fmt)},
                      {"standard_error", rounded(result.standard_error(i), fmt)}});
  json doc{{"states", std::move(states)}, {"events", result.events}};
  return doc.dump(2) + "\n";
}

std::string network_sim_json(const NetworkSimResult& result, const SimConfig& cfg,
                             const Formatting& fmt) {
  json nodes = json::array();
  for (const NodeOccupancy& n : result.nodes) {
    json occ = json::array();
    for (double p : n.occupancy) occ.push_back(rounded(p, fmt));
    nodes.push_back({{"node", n.node},
                     {"occupancy", std::move(occ)},
                     {"blocked_fraction", rounded(n.blocked_fraction, fmt)},
                     {"mean_jobs", rounded(n.mean_jobs, fmt)}});
  }
  json doc;
  doc["config"] = {
      {"seed", cfg.seed},
      {"horizon", cfg.horizon.value},
      {"horizon_kind", cfg.horizon.kind == Horizon::Kind::Time ? "time" : "events"},
      {"replications", cfg.replications},
      {"warmup_fraction", cfg.warmup_fraction}};
  doc["nodes"] = std::move(nodes);
  doc["arrivals"] = result.arrivals;
  doc["completed"] = result.completed;
  doc["dropped"] = result.dropped;
  doc["in_flight"] = result.in_flight;
  doc["events"] = result.events;
  doc["drop_fraction"] = rounded(result.drop_fraction, fmt);
  doc["mean_jobs"] = rounded(result.mean_jobs, fmt);
  doc["mean_response_time"] = rounded(result.mean_response_time, fmt);
  doc["response_time_standard_error"] = rounded(result.response_time_standard_error, fmt);
  doc["mean_hops"] = rounded(result.mean_hops, fmt);
  return doc.dump(2) + "\n";
}

std::string network_sim_csv(const NetworkSimResult& result, const Formatting& fmt) {
  std::size_t levels = 0;
  for (const NodeOccupancy& n : result.nodes) levels = std::max(levels, n.occupancy.size());
  std::ostringstream os;
  os << "node,mean_jobs,blocked";
  for (std::size_t k = 0; k < levels; ++k) os << ",p" << k;
  os << '\n';
  for (const NodeOccupancy& n : result.nodes) {
    os << n.node << ',' << format_number(n.mean_jobs, fmt) << ','
       << format_number(n.blocked_fraction, fmt);
    for (std::size_t k = 0; k < levels; ++k) {
      os << ',';
      if (k < n.occupancy.size()) os << format_number(n.occupancy[k], fmt);
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace qnswap
