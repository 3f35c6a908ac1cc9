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

#include "qnswap/metrics.hpp"
#include "qnswap/pfqn.hpp"
#include "qnswap/sim.hpp"

namespace qnswap {

/// Number presentation: 6 significant digits, or fixed decimals when
/// `round_decimals` is set. JSON keeps full precision unless rounded.
struct Formatting {
  std::optional<int> round_decimals;
};

std::string format_number(double value, const Formatting& fmt = {});

std::string analysis_json(const NetworkAnalysis& analysis, const Formatting& fmt = {},
                          const std::optional<SwapDepthReport>& swap = std::nullopt);
/// Columns: node, pi00, pi10, pi01, rho, kbar, tbar.
std::string analysis_csv(const NetworkAnalysis& analysis, const Formatting& fmt = {});
std::string analysis_table(const NetworkAnalysis& analysis, const Formatting& fmt = {},
                           const std::optional<SwapDepthReport>& swap = std::nullopt);

std::string ctmc_sim_json(const CtmcSimResult& result, const Formatting& fmt = {});
std::string network_sim_json(const NetworkSimResult& result, const SimConfig& cfg,
                             const Formatting& fmt = {});
/// Per-node occupancy: node, mean_jobs, blocked, p0 .. pK.
std::string network_sim_csv(const NetworkSimResult& result, const Formatting& fmt = {});

}  // namespace qnswap
