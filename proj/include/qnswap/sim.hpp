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

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "qnswap/ctmc.hpp"
#include "qnswap/model.hpp"

namespace qnswap {

/// Simulated time units, or a number of fired events.
struct Horizon {
  enum class Kind { Time, Events };
  Kind kind = Kind::Time;
  double value = 1e5;

  static Horizon time(double t) { return {Kind::Time, t}; }
  static Horizon events(std::uint64_t n) { return {Kind::Events, static_cast<double>(n)}; }
};

struct SimConfig {
  std::uint64_t seed = 1;
  Horizon horizon;
  int replications = 1;
  /// Leading fraction of the horizon excluded from statistics.
  double warmup_fraction = 0.2;
};

/// 64-bit stream keyed by (seed, replication). Streams for different
/// replications are decorrelated through SplitMix64 before seeding.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t replication);

  /// Uniform on the open interval (0, 1), 53 bits.
  double uniform();
  double exponential(double rate);
  std::uint64_t draws() const noexcept { return draws_; }

 private:
  std::mt19937_64 engine_;
  std::uint64_t draws_ = 0;
};

struct CtmcSimResult {
  std::vector<std::string> states;
  /// Time-weighted occupancy fraction per state, averaged over replications.
  Eigen::VectorXd occupancy;
  /// Across replications when there are several, batch means otherwise.
  Eigen::VectorXd standard_error;
  std::vector<Eigen::VectorXd> replication_occupancy;
  std::uint64_t events = 0;
};

/// Trajectory simulation of a CTMC started in its first state.
CtmcSimResult simulate_ctmc(const Generator<double>& gen, const SimConfig& cfg);

struct NodeOccupancy {
  int node = 0;
  /// Time fraction with 0..capacity jobs present.
  std::vector<double> occupancy;
  /// Time fraction during which the job at the server was blocked.
  double blocked_fraction = 0.0;
  double mean_jobs = 0.0;
};

struct NetworkReplication {
  std::vector<NodeOccupancy> nodes;
  std::uint64_t arrivals = 0;
  std::uint64_t completed = 0;
  std::uint64_t dropped = 0;
  std::uint64_t in_flight = 0;
  std::uint64_t events = 0;
  // Over jobs completing after warmup.
  std::uint64_t observed_jobs = 0;
  double response_time_sum = 0.0;
  double hop_sum = 0.0;
  double response_time_batch_se = 0.0;
  double end_time = 0.0;
};

struct NetworkSimResult {
  std::vector<NodeOccupancy> nodes;  // spec order, averaged over replications
  double mean_jobs = 0.0;            // network population
  double mean_response_time = 0.0;
  double response_time_standard_error = 0.0;
  double mean_hops = 0.0;
  std::uint64_t arrivals = 0;
  std::uint64_t completed = 0;
  std::uint64_t dropped = 0;
  std::uint64_t in_flight = 0;
  std::uint64_t events = 0;
  double drop_fraction = 0.0;
  std::vector<NetworkReplication> replications;
};

/// Event-driven simulation with blocking after service. A served job picks
/// among its non-full destinations (and the exit) in proportion to p_ij; if
/// all are full it holds its server and later moves to the first destination
/// that frees (lowest id when several free at once; earliest-blocked job
/// first). External arrivals to a full node are dropped.
NetworkSimResult simulate_blocking_network(const NetworkSpec& spec, const SimConfig& cfg);

}  // namespace qnswap
