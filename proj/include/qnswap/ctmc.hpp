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

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "qnswap/error.hpp"
#include "qnswap/traffic.hpp"

namespace qnswap {

/// Ordered, uniquely labelled states of one chain.
class StateSpace {
 public:
  explicit StateSpace(std::vector<std::string> labels);

  /// (0,0) idle, (1,0) in service, (0,1) served but blocked.
  static StateSpace blocking_node();
  /// Occupancy levels "0" .. "K".
  static StateSpace occupancy(int capacity);

  Eigen::Index size() const noexcept { return static_cast<Eigen::Index>(labels_.size()); }
  const std::string& label(Eigen::Index i) const { return labels_[static_cast<std::size_t>(i)]; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  bool contains(std::string_view label) const;
  Eigen::Index index(std::string_view label) const;

  bool operator==(const StateSpace& other) const { return labels_ == other.labels_; }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, Eigen::Index> index_;
};

namespace blocking_state {
inline constexpr std::string_view kIdle = "(0,0)";
inline constexpr std::string_view kBusy = "(1,0)";
inline constexpr std::string_view kBlocked = "(0,1)";
}  // namespace blocking_state

namespace detail {

template <typename Scalar>
Scalar tolerance(double nominal) {
  return std::max(Scalar(nominal), Scalar(64) * std::numeric_limits<Scalar>::epsilon());
}

}  // namespace detail

template <typename Scalar>
struct Transition {
  std::string from;
  std::string to;
  Scalar rate;
};

/// Transition-rate matrix Q with zero row sums and non-negative off-diagonals.
template <typename Scalar = double>
class Generator {
 public:
  Generator(StateSpace states, Matrix<Scalar> rates)
      : states_(std::move(states)), rates_(std::move(rates)) {
    const Eigen::Index n = states_.size();
    if (rates_.rows() != n || rates_.cols() != n)
      fail(ErrorCode::DimensionMismatch, "generator must be square over its state space");
    using std::abs;
    const Scalar scale = std::max(Scalar(1), rates_.cwiseAbs().maxCoeff());
    for (Eigen::Index l = 0; l < n; ++l) {
      for (Eigen::Index m = 0; m < n; ++m)
        if (m != l && !(rates_(l, m) >= Scalar(0)))
          fail(ErrorCode::NegativeRate, states_.label(l) + "->" + states_.label(m));
      if (abs(rates_.row(l).sum()) > detail::tolerance<Scalar>(1e-12) * scale)
        fail(ErrorCode::NumericalFailure, "row " + states_.label(l) + " does not sum to zero");
    }
  }

  const StateSpace& states() const noexcept { return states_; }
  const Matrix<Scalar>& matrix() const noexcept { return rates_; }
  Eigen::Index size() const noexcept { return states_.size(); }
  Scalar rate(std::string_view from, std::string_view to) const {
    return rates_(states_.index(from), states_.index(to));
  }

 private:
  StateSpace states_;
  Matrix<Scalar> rates_;
};

/// Steady-state probability vector over a labelled state space.
template <typename Scalar = double>
class MarginalDistribution {
 public:
  MarginalDistribution(StateSpace states, Vector<Scalar> probabilities)
      : states_(std::move(states)), probabilities_(std::move(probabilities)) {
    if (probabilities_.size() != states_.size())
      fail(ErrorCode::DimensionMismatch, "one probability per state is required");
    using std::abs;
    for (Eigen::Index i = 0; i < probabilities_.size(); ++i)
      if (!(probabilities_(i) >= Scalar(0)))
        fail(ErrorCode::NumericalFailure, "negative probability for " + states_.label(i));
    if (abs(probabilities_.sum() - Scalar(1)) > detail::tolerance<Scalar>(1e-12))
      fail(ErrorCode::NumericalFailure, "probabilities do not sum to one");
  }

  const StateSpace& states() const noexcept { return states_; }
  const Vector<Scalar>& probabilities() const noexcept { return probabilities_; }
  Scalar operator[](std::string_view label) const { return probabilities_(states_.index(label)); }
  Scalar operator()(Eigen::Index i) const { return probabilities_(i); }

  bool operator==(const MarginalDistribution& other) const {
    return states_ == other.states_ && probabilities_ == other.probabilities_;
  }

 private:
  StateSpace states_;
  Vector<Scalar> probabilities_;
};

/// Off-diagonals from `transitions` (duplicates accumulate), diagonals
/// q_ll = -sum_{m != l} q_lm.
template <typename Scalar = double>
Generator<Scalar> build_generator(StateSpace states,
                                  const std::vector<Transition<Scalar>>& transitions) {
  const Eigen::Index n = states.size();
  Matrix<Scalar> q = Matrix<Scalar>::Zero(n, n);
  for (const auto& t : transitions) {
    const Eigen::Index from = states.index(t.from);
    const Eigen::Index to = states.index(t.to);
    if (from == to) fail(ErrorCode::InvalidArgument, "self transition on " + t.from);
    if (!(t.rate >= Scalar(0))) fail(ErrorCode::NegativeRate, t.from + "->" + t.to);
    q(from, to) += t.rate;
  }
  for (Eigen::Index l = 0; l < n; ++l) {
    Scalar out(0);
    for (Eigen::Index m = 0; m < n; ++m)
      if (m != l) out += q(l, m);
    q(l, l) = -out;
  }
  return Generator<Scalar>(std::move(states), std::move(q));
}

/// Number of closed communicating classes of the nonzero off-diagonal
/// pattern. A chain with exactly one has a unique stationary distribution.
template <typename Scalar>
int closed_class_count(const Generator<Scalar>& gen) {
  const Eigen::Index n = gen.size();
  const auto& q = gen.matrix();
  std::vector<std::vector<bool>> reach(static_cast<std::size_t>(n),
                                       std::vector<bool>(static_cast<std::size_t>(n), false));
  for (Eigen::Index s = 0; s < n; ++s) {
    auto& seen = reach[static_cast<std::size_t>(s)];
    std::vector<Eigen::Index> stack{s};
    seen[static_cast<std::size_t>(s)] = true;
    while (!stack.empty()) {
      const Eigen::Index l = stack.back();
      stack.pop_back();
      for (Eigen::Index m = 0; m < n; ++m) {
        if (m != l && q(l, m) > Scalar(0) && !seen[static_cast<std::size_t>(m)]) {
          seen[static_cast<std::size_t>(m)] = true;
          stack.push_back(m);
        }
      }
    }
  }
  // s is recurrent iff everything it reaches reaches it back; recurrent
  // states of one class share the same reachable set.
  std::vector<std::vector<bool>> classes;
  for (Eigen::Index s = 0; s < n; ++s) {
    const auto& from_s = reach[static_cast<std::size_t>(s)];
    bool recurrent = true;
    for (Eigen::Index m = 0; m < n && recurrent; ++m)
      if (from_s[static_cast<std::size_t>(m)] &&
          !reach[static_cast<std::size_t>(m)][static_cast<std::size_t>(s)])
        recurrent = false;
    if (recurrent && std::find(classes.begin(), classes.end(), from_s) == classes.end())
      classes.push_back(from_s);
  }
  return static_cast<int>(classes.size());
}

/// Max-norm of pi Q.
template <typename Scalar>
Scalar balance_residual(const Generator<Scalar>& gen, const Vector<Scalar>& pi) {
  return (pi.transpose() * gen.matrix()).cwiseAbs().maxCoeff();
}

/// Solves pi Q = 0, sum(pi) = 1. The balance equation of the state with
/// the largest |q_ll| is replaced by the normalization row.
template <typename Scalar>
MarginalDistribution<Scalar> steady_state(const Generator<Scalar>& gen) {
  if (closed_class_count(gen) != 1)
    fail(ErrorCode::Reducible, "chain has more than one closed communicating class");

  const Eigen::Index n = gen.size();
  Matrix<Scalar> system = gen.matrix().transpose();
  Eigen::Index replaced = 0;
  system.diagonal().cwiseAbs().maxCoeff(&replaced);
  system.row(replaced).setOnes();
  Vector<Scalar> rhs = Vector<Scalar>::Zero(n);
  rhs(replaced) = Scalar(1);

  Eigen::PartialPivLU<Matrix<Scalar>> lu(system);
  using std::abs;
  const Scalar scale = std::max(Scalar(1), system.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < n; ++i)
    if (abs(lu.matrixLU()(i, i)) < Scalar(kSingularPivot) * scale)
      fail(ErrorCode::NumericalFailure, "balance system is singular after normalization");
  Vector<Scalar> pi = lu.solve(rhs);

  const Scalar tol = detail::tolerance<Scalar>(1e-10);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (pi(i) < -tol) fail(ErrorCode::NumericalFailure, "negative steady-state probability");
    pi(i) = std::max(pi(i), Scalar(0));
  }
  pi /= pi.sum();
  if (balance_residual(gen, pi) > tol * std::max(Scalar(1), gen.matrix().cwiseAbs().maxCoeff()))
    fail(ErrorCode::NumericalFailure, "steady-state residual exceeds tolerance");
  return MarginalDistribution<Scalar>(gen.states(), std::move(pi));
}

namespace detail {

template <typename Scalar>
void check_blocking_parameters(Scalar arrival, Scalar service, Scalar unblock, Scalar pb) {
  if (!(arrival >= Scalar(0))) fail(ErrorCode::NegativeRate, "lambda");
  if (!(service >= Scalar(0))) fail(ErrorCode::NegativeRate, "mu");
  if (!(unblock >= Scalar(0))) fail(ErrorCode::NegativeRate, "mu_b");
  if (arrival == Scalar(0)) fail(ErrorCode::ZeroRate, "lambda");
  if (service == Scalar(0)) fail(ErrorCode::ZeroRate, "mu");
  if (unblock == Scalar(0)) fail(ErrorCode::ZeroRate, "mu_b");
  if (!(pb >= Scalar(0) && pb <= Scalar(1)))
    fail(ErrorCode::ProbabilityOutOfRange, "blocking probability");
}

}  // namespace detail

/// Three-state chain of a capacity-one station whose served job may be
/// blocked by a full neighbour.
template <typename Scalar>
Generator<Scalar> blocking_node_chain(Scalar arrival, Scalar service, Scalar unblock, Scalar pb) {
  detail::check_blocking_parameters(arrival, service, unblock, pb);
  using namespace blocking_state;
  const std::string idle(kIdle), busy(kBusy), blocked(kBlocked);
  return build_generator<Scalar>(StateSpace::blocking_node(),
                                 {{idle, busy, arrival},
                                  {busy, idle, service * (Scalar(1) - pb)},
                                  {busy, blocked, service * pb},
                                  {blocked, idle, unblock}});
}

/// Balance equations of blocking_node_chain solved by hand:
/// pi(1,0) = (lambda/mu) pi(0,0), pi(0,1) = (lambda P_b / mu_b) pi(0,0).
template <typename Scalar>
MarginalDistribution<Scalar> blocking_node_closed_form(Scalar arrival, Scalar service,
                                                       Scalar unblock, Scalar pb) {
  detail::check_blocking_parameters(arrival, service, unblock, pb);
  const Scalar busy = arrival / service;
  const Scalar blocked = arrival * pb / unblock;
  const Scalar idle = Scalar(1) / (Scalar(1) + busy + blocked);
  Vector<Scalar> pi(3);
  pi << idle, busy * idle, blocked * idle;
  return MarginalDistribution<Scalar>(StateSpace::blocking_node(), std::move(pi));
}

/// Within this distance of 1 the M/M/1/K formulas use their rho = 1 limit.
inline constexpr double kUnitRhoBand = 1e-9;

namespace detail {

// pi(n) = rho^n (1 - rho) / (1 - rho^(K+1)), evaluated via log1p/expm1 and
// reflected through 1/rho when rho > 1 so nothing overflows.
template <typename Scalar>
Scalar mm1k_state_probability(Scalar rho, int capacity, int level) {
  using std::abs;
  using std::expm1;
  using std::log1p;
  using std::pow;
  if (abs(rho - Scalar(1)) <= Scalar(kUnitRhoBand)) return Scalar(1) / Scalar(capacity + 1);
  if (rho == Scalar(0)) return level == 0 ? Scalar(1) : Scalar(0);
  Scalar r = rho;
  int n = level;
  if (rho > Scalar(1)) {
    r = Scalar(1) / rho;
    n = capacity - level;
  }
  const Scalar denom = -expm1(Scalar(capacity + 1) * log1p(r - Scalar(1)));
  return pow(r, n) * (Scalar(1) - r) / denom;
}

template <typename Scalar>
void check_mm1k(Scalar rho, int capacity) {
  if (!(rho >= Scalar(0))) fail(ErrorCode::NegativeRho, "rho must be non-negative");
  if (capacity < 1) fail(ErrorCode::InvalidArgument, "capacity must be >= 1");
}

}  // namespace detail

/// Probability that an M/M/1/K station is full; 1/(K+1) in the rho = 1 limit.
template <typename Scalar>
Scalar mm1k_full_probability(Scalar rho, int capacity) {
  detail::check_mm1k(rho, capacity);
  return detail::mm1k_state_probability(rho, capacity, capacity);
}

template <typename Scalar>
MarginalDistribution<Scalar> mm1k_distribution(Scalar rho, int capacity) {
  detail::check_mm1k(rho, capacity);
  Vector<Scalar> pi(capacity + 1);
  for (int level = 0; level <= capacity; ++level)
    pi(level) = detail::mm1k_state_probability(rho, capacity, level);
  return MarginalDistribution<Scalar>(StateSpace::occupancy(capacity), std::move(pi));
}

/// Birth-death generator of an M/M/1/K station.
template <typename Scalar>
Generator<Scalar> mm1k_generator(Scalar arrival, Scalar service, int capacity) {
  if (capacity < 1) fail(ErrorCode::InvalidArgument, "capacity must be >= 1");
  std::vector<Transition<Scalar>> transitions;
  for (int level = 0; level < capacity; ++level) {
    transitions.push_back({std::to_string(level), std::to_string(level + 1), arrival});
    transitions.push_back({std::to_string(level + 1), std::to_string(level), service});
  }
  return build_generator<Scalar>(StateSpace::occupancy(capacity), transitions);
}

}  // namespace qnswap
