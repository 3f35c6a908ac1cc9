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

#include "qnswap/sim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <future>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <set>

namespace qnswap {

namespace {

constexpr int kBatches = 20;
constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

void check_config(const SimConfig& cfg) {
  if (!(cfg.horizon.value > 0.0)) fail(ErrorCode::ZeroHorizon, "horizon must be positive");
  if (cfg.horizon.kind == Horizon::Kind::Events && cfg.horizon.value < 1.0)
    fail(ErrorCode::ZeroHorizon, "event budget must be at least one event");
  if (cfg.replications < 1) fail(ErrorCode::InvalidArgument, "replications must be >= 1");
  if (!(cfg.warmup_fraction >= 0.0 && cfg.warmup_fraction <= 0.5))
    fail(ErrorCode::InvalidArgument, "warmup fraction must lie in [0, 0.5]");
}

/// Runs `body(r)` for every replication, concurrently when there are
/// several, and returns the results in replication order.
template <typename Body>
auto run_replications(int replications, Body body) {
  using Result = decltype(body(0));
  std::vector<Result> out;
  if (replications == 1) {
    out.push_back(body(0));
    return out;
  }
  std::vector<std::future<Result>> pending;
  for (int r = 0; r < replications; ++r)
    pending.push_back(std::async(std::launch::async, body, r));
  for (auto& f : pending) out.push_back(f.get());
  return out;
}

double batch_standard_error(const std::vector<double>& batches) {
  const auto b = static_cast<double>(batches.size());
  if (batches.size() < 2) return 0.0;
  double mean = 0.0;
  for (double x : batches) mean += x;
  mean /= b;
  double ss = 0.0;
  for (double x : batches) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / (b - 1.0) / b);
}

// Observation window: statistics are collected on [start, end].
struct Window {
  double start = 0.0;
  double overlap(double t0, double t1) const {
    const double lo = std::max(t0, start);
    return t1 > lo ? t1 - lo : 0.0;
  }
};

struct CtmcReplication {
  Eigen::VectorXd occupancy;
  Eigen::VectorXd batch_se;
  std::uint64_t events = 0;
};

CtmcReplication run_ctmc(const Generator<double>& gen, const SimConfig& cfg, int replication) {
  RandomStream rng(cfg.seed, static_cast<std::uint64_t>(replication));
  const auto& q = gen.matrix();
  const Eigen::Index n = gen.size();
  const bool by_time = cfg.horizon.kind == Horizon::Kind::Time;
  const double horizon = cfg.horizon.value;
  const auto budget = static_cast<std::uint64_t>(horizon);
  const auto warmup_events = static_cast<std::uint64_t>(cfg.warmup_fraction * horizon);

  Window window{by_time ? cfg.warmup_fraction * horizon : (warmup_events == 0 ? 0.0 : kInf)};
  Eigen::MatrixXd batch_time = Eigen::MatrixXd::Zero(kBatches, n);
  Eigen::VectorXd batch_total = Eigen::VectorXd::Zero(kBatches);

  auto batch_of = [&](double t, std::uint64_t events) {
    double frac = 0.0;
    if (by_time)
      frac = (std::max(t, window.start) - window.start) / (horizon - window.start);
    else
      frac = static_cast<double>(events - std::min(events, warmup_events)) /
             static_cast<double>(budget - warmup_events);
    return std::clamp(static_cast<int>(frac * kBatches), 0, kBatches - 1);
  };
  auto record = [&](Eigen::Index s, double t0, double t1, std::uint64_t events) {
    const double dt = window.overlap(t0, t1);
    if (dt <= 0.0) return;
    const int b = batch_of(t0, events);
    batch_time(b, s) += dt;
    batch_total(b) += dt;
  };

  Eigen::Index state = 0;
  double t = 0.0;
  std::uint64_t events = 0;
  while (true) {
    if (!by_time && events >= budget) break;
    const double out_rate = -q(state, state);
    const double hold = out_rate > 0.0 ? rng.exponential(out_rate) : kInf;
    const double next_t = t + hold;
    if (by_time && next_t > horizon) {
      record(state, t, horizon, events);
      break;
    }
    if (hold == kInf) break;
    record(state, t, next_t, events);

    const double u = rng.uniform() * out_rate;
    double cum = 0.0;
    Eigen::Index next = state;
    for (Eigen::Index m = 0; m < n; ++m) {
      if (m == state || q(state, m) <= 0.0) continue;
      cum += q(state, m);
      next = m;
      if (u < cum) break;
    }
    state = next;
    t = next_t;
    ++events;
    if (!by_time && events == warmup_events) window.start = t;
  }

  CtmcReplication out;
  out.events = events;
  const double total = batch_total.sum();
  if (total > 0.0) {
    out.occupancy = batch_time.colwise().sum().transpose() / total;
  } else {
    out.occupancy = Eigen::VectorXd::Zero(n);
    out.occupancy(state) = 1.0;
  }
  out.batch_se = Eigen::VectorXd::Zero(n);
  for (Eigen::Index s = 0; s < n; ++s) {
    std::vector<double> batches;
    for (int b = 0; b < kBatches; ++b)
      if (batch_total(b) > 0.0) batches.push_back(batch_time(b, s) / batch_total(b));
    out.batch_se(s) = batch_standard_error(batches);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Blocking network

enum class EventKind { Arrival, Completion };

struct Event {
  double time;
  std::uint64_t seq;
  EventKind kind;
  std::size_t node;
};

struct Later {
  bool operator()(const Event& a, const Event& b) const {
    return a.time != b.time ? a.time > b.time : a.seq > b.seq;
  }
};

struct Job {
  double entry_time = 0.0;
  int hops = 0;
};

enum class ServerState { Idle, Serving, Blocked };

struct Station {
  int id = 0;
  int capacity = 1;
  double service_rate = 1.0;
  double external_rate = 0.0;
  double exit = 0.0;
  std::vector<std::pair<std::size_t, double>> targets;  // ascending by id
  std::deque<std::size_t> jobs;                         // head is at the server
  ServerState server = ServerState::Idle;
  std::uint64_t blocked_seq = 0;
  std::vector<double> level_time;
  double blocked_time = 0.0;

  bool full() const { return jobs.size() >= static_cast<std::size_t>(capacity); }
  bool routes_to(std::size_t j) const {
    for (const auto& [t, p] : targets)
      if (t == j) return true;
    return false;
  }
};

class NetworkRun {
 public:
  NetworkRun(const NetworkSpec& spec, const SimConfig& cfg, int replication)
      : cfg_(cfg), rng_(cfg.seed, static_cast<std::uint64_t>(replication)) {
    for (const NodeSpec& n : spec.nodes) {
      Station s;
      s.id = n.id;
      s.capacity = n.capacity;
      s.service_rate = n.service_rate;
      s.external_rate = spec.external_rate(n.id);
      s.exit = spec.routing.exit_probability(n.id);
      for (const auto& [to, p] : spec.routing.row(n.id))
        if (p > 0.0) s.targets.emplace_back(spec.index_of(to), p);
      s.level_time.assign(static_cast<std::size_t>(n.capacity) + 1, 0.0);
      stations_.push_back(std::move(s));
    }
    for (std::size_t i = 0; i < stations_.size(); ++i) order_[stations_[i].id] = i;
  }

  NetworkReplication run() {
    const bool by_time = cfg_.horizon.kind == Horizon::Kind::Time;
    const double horizon = cfg_.horizon.value;
    const auto budget = static_cast<std::uint64_t>(horizon);
    const auto warmup_events = static_cast<std::uint64_t>(cfg_.warmup_fraction * horizon);
    window_.start = by_time ? cfg_.warmup_fraction * horizon : (warmup_events == 0 ? 0.0 : kInf);

    for (std::size_t i = 0; i < stations_.size(); ++i)
      if (stations_[i].external_rate > 0.0)
        schedule(rng_.exponential(stations_[i].external_rate), EventKind::Arrival, i);

    std::uint64_t events = 0;
    while (!calendar_.empty()) {
      if (!by_time && events >= budget) break;
      const Event ev = calendar_.top();
      if (by_time && ev.time > horizon) break;
      calendar_.pop();
      advance(ev.time);
      if (ev.kind == EventKind::Arrival)
        on_arrival(ev.node);
      else
        on_completion(ev.node);
      ++events;
      if (!by_time && events == warmup_events) window_.start = now_;
    }
    if (by_time) advance(horizon);

    NetworkReplication out;
    out.events = events;
    out.end_time = now_;
    out.arrivals = arrivals_;
    out.completed = completed_;
    out.dropped = dropped_;
    for (const Station& s : stations_) out.in_flight += s.jobs.size();
    out.observed_jobs = response_times_.size();
    for (double rt : response_times_) out.response_time_sum += rt;
    out.hop_sum = hop_sum_;
    out.response_time_batch_se = response_batch_se();

    const double observed = window_.overlap(0.0, now_);
    for (const Station& s : stations_) {
      NodeOccupancy occ;
      occ.node = s.id;
      occ.occupancy.assign(s.level_time.size(), 0.0);
      if (observed > 0.0) {
        for (std::size_t k = 0; k < s.level_time.size(); ++k) {
          occ.occupancy[k] = s.level_time[k] / observed;
          occ.mean_jobs += static_cast<double>(k) * occ.occupancy[k];
        }
        occ.blocked_fraction = s.blocked_time / observed;
      } else {
        occ.occupancy[std::min(s.jobs.size(), occ.occupancy.size() - 1)] = 1.0;
        occ.mean_jobs = static_cast<double>(s.jobs.size());
      }
      out.nodes.push_back(std::move(occ));
    }
    return out;
  }

 private:
  void schedule(double delay, EventKind kind, std::size_t node) {
    calendar_.push(Event{now_ + delay, seq_++, kind, node});
  }

  void advance(double t) {
    const double dt = window_.overlap(now_, t);
    if (dt > 0.0) {
      for (Station& s : stations_) {
        s.level_time[s.jobs.size()] += dt;
        if (s.server == ServerState::Blocked) s.blocked_time += dt;
      }
    }
    now_ = t;
  }

  void start_service(std::size_t i) {
    Station& s = stations_[i];
    if (s.server != ServerState::Idle || s.jobs.empty()) return;
    s.server = ServerState::Serving;
    schedule(rng_.exponential(s.service_rate), EventKind::Completion, i);
  }

  void on_arrival(std::size_t i) {
    Station& s = stations_[i];
    ++arrivals_;
    if (s.full()) {
      ++dropped_;
    } else {
      jobs_.push_back(Job{now_, 0});
      s.jobs.push_back(jobs_.size() - 1);
      start_service(i);
    }
    schedule(rng_.exponential(s.external_rate), EventKind::Arrival, i);
  }

  void on_completion(std::size_t i) {
    Station& s = stations_[i];
    double weight = s.exit;
    for (const auto& [t, p] : s.targets)
      if (!stations_[t].full()) weight += p;
    if (weight <= 0.0) {
      s.server = ServerState::Blocked;
      s.blocked_seq = seq_++;
      blocked_.emplace(s.blocked_seq, i);
      return;
    }
    const double u = rng_.uniform() * weight;
    double cum = s.exit;
    std::optional<std::size_t> dest;
    if (u >= cum) {
      for (const auto& [t, p] : s.targets) {
        if (stations_[t].full()) continue;
        cum += p;
        dest = t;
        if (u < cum) break;
      }
    }
    if (dest)
      move(i, *dest);
    else
      leave(i);
    drain();
  }

  // Head job of `from` enters `to`.
  void move(std::size_t from, std::size_t to) {
    const std::size_t job = stations_[from].jobs.front();
    ++jobs_[job].hops;
    stations_[to].jobs.push_back(job);
    start_service(to);
    release(from);
  }

  void leave(std::size_t from) {
    const Job& job = jobs_[stations_[from].jobs.front()];
    ++completed_;
    if (now_ >= window_.start) {
      response_times_.push_back(now_ - job.entry_time);
      hop_sum_ += job.hops;
    }
    release(from);
  }

  void release(std::size_t i) {
    Station& s = stations_[i];
    s.jobs.pop_front();
    s.server = ServerState::Idle;
    start_service(i);
    freed_.insert(s.id);
  }

  // Unblocking cascade: hand freed slots to blocked jobs until quiescent.
  void drain() {
    while (!freed_.empty()) {
      const std::size_t f = order_.at(*freed_.begin());
      freed_.erase(freed_.begin());
      while (!stations_[f].full()) {
        auto it = blocked_.begin();
        while (it != blocked_.end() && !stations_[it->second].routes_to(f)) ++it;
        if (it == blocked_.end()) break;
        const std::size_t from = it->second;
        blocked_.erase(it);
        move(from, f);
      }
    }
  }

  double response_batch_se() const {
    const std::size_t n = response_times_.size();
    if (n < 2 * kBatches) return 0.0;
    std::vector<double> batches(kBatches, 0.0);
    const std::size_t per = n / kBatches;
    for (int b = 0; b < kBatches; ++b) {
      for (std::size_t k = 0; k < per; ++k)
        batches[static_cast<std::size_t>(b)] += response_times_[static_cast<std::size_t>(b) * per + k];
      batches[static_cast<std::size_t>(b)] /= static_cast<double>(per);
    }
    return batch_standard_error(batches);
  }

  const SimConfig& cfg_;
  RandomStream rng_;
  std::vector<Station> stations_;
  std::map<int, std::size_t> order_;
  std::priority_queue<Event, std::vector<Event>, Later> calendar_;
  std::map<std::uint64_t, std::size_t> blocked_;  // blocking order -> station
  std::set<int> freed_;                           // node ids with a new free slot
  std::vector<Job> jobs_;
  std::vector<double> response_times_;
  double hop_sum_ = 0.0;
  Window window_;
  double now_ = 0.0;
  std::uint64_t seq_ = 0;
  std::uint64_t arrivals_ = 0, completed_ = 0, dropped_ = 0;
};

}  // namespace

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t replication)
    : engine_(splitmix64(splitmix64(seed) ^ splitmix64(~replication))) {}

double RandomStream::uniform() {
  if (draws_ == std::numeric_limits<std::uint64_t>::max())
    fail(ErrorCode::RngStreamExhausted, "random stream exhausted");
  ++draws_;
  // (k + 0.5) / 2^53 never hits 0 or 1.
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double RandomStream::exponential(double rate) { return -std::log(uniform()) / rate; }

CtmcSimResult simulate_ctmc(const Generator<double>& gen, const SimConfig& cfg) {
  check_config(cfg);
  if (closed_class_count(gen) != 1)
    fail(ErrorCode::Reducible, "chain has more than one closed communicating class");

  auto reps = run_replications(cfg.replications, [&](int r) { return run_ctmc(gen, cfg, r); });

  CtmcSimResult out;
  out.states = gen.states().labels();
  const Eigen::Index n = gen.size();
  out.occupancy = Eigen::VectorXd::Zero(n);
  for (const auto& r : reps) {
    out.occupancy += r.occupancy;
    out.replication_occupancy.push_back(r.occupancy);
    out.events += r.events;
  }
  const auto count = static_cast<double>(reps.size());
  out.occupancy /= count;
  if (reps.size() == 1) {
    out.standard_error = reps.front().batch_se;
  } else {
    out.standard_error = Eigen::VectorXd::Zero(n);
    for (const auto& r : reps) out.standard_error += (r.occupancy - out.occupancy).cwiseAbs2();
    out.standard_error = (out.standard_error / (count - 1.0) / count).cwiseSqrt();
  }
  return out;
}

NetworkSimResult simulate_blocking_network(const NetworkSpec& spec, const SimConfig& cfg) {
  check_config(cfg);
  const NetworkSpec valid = validate_network(spec);
  auto reps = run_replications(cfg.replications,
                               [&](int r) { return NetworkRun(valid, cfg, r).run(); });

  NetworkSimResult out;
  const auto count = static_cast<double>(reps.size());
  out.nodes = reps.front().nodes;
  for (auto& node : out.nodes) {
    std::fill(node.occupancy.begin(), node.occupancy.end(), 0.0);
    node.blocked_fraction = 0.0;
    node.mean_jobs = 0.0;
  }
  std::uint64_t observed = 0;
  double response_sum = 0.0, hop_sum = 0.0;
  std::vector<double> rep_means;
  for (const auto& r : reps) {
    for (std::size_t i = 0; i < out.nodes.size(); ++i) {
      for (std::size_t k = 0; k < out.nodes[i].occupancy.size(); ++k)
        out.nodes[i].occupancy[k] += r.nodes[i].occupancy[k] / count;
      out.nodes[i].blocked_fraction += r.nodes[i].blocked_fraction / count;
      out.nodes[i].mean_jobs += r.nodes[i].mean_jobs / count;
    }
    out.arrivals += r.arrivals;
    out.completed += r.completed;
    out.dropped += r.dropped;
    out.in_flight += r.in_flight;
    out.events += r.events;
    observed += r.observed_jobs;
    response_sum += r.response_time_sum;
    hop_sum += r.hop_sum;
    if (r.observed_jobs > 0)
      rep_means.push_back(r.response_time_sum / static_cast<double>(r.observed_jobs));
  }
  for (const auto& node : out.nodes) out.mean_jobs += node.mean_jobs;
  if (observed > 0) {
    out.mean_response_time = response_sum / static_cast<double>(observed);
    out.mean_hops = hop_sum / static_cast<double>(observed);
  }
  out.response_time_standard_error =
      reps.size() == 1 ? reps.front().response_time_batch_se : batch_standard_error(rep_means);
  if (out.arrivals > 0)
    out.drop_fraction = static_cast<double>(out.dropped) / static_cast<double>(out.arrivals);
  out.replications = std::move(reps);
  return out;
}

}  // namespace qnswap
