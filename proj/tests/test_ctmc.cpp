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
#include "oracles.hpp"
#include "qnswap/ctmc.hpp"
#include "qnswap/error.hpp"

using namespace qnswap;
using namespace qnswap::blocking_state;

namespace {

oracle::Dense to_dense(const Generator<double>& gen) {
  const auto& q = gen.matrix();
  oracle::Dense out(q.rows(), std::vector<double>(q.cols()));
  for (Eigen::Index i = 0; i < q.rows(); ++i)
    for (Eigen::Index j = 0; j < q.cols(); ++j) out[i][j] = q(i, j);
  return out;
}

void check_generator_invariants(const Generator<double>& gen) {
  const auto& q = gen.matrix();
  for (Eigen::Index l = 0; l < q.rows(); ++l) {
    CHECK(std::abs(q.row(l).sum()) <= 1e-12);
    for (Eigen::Index m = 0; m < q.cols(); ++m)
      if (m != l) CHECK(q(l, m) >= 0.0);
  }
}

}  // namespace

TEST_CASE("build_generator fills diagonals") {
  const auto gen = build_generator<double>(StateSpace({"a", "b"}), {{"a", "b", 2.0}});
  Eigen::Matrix2d expected;
  expected << -2.0, 2.0, 0.0, 0.0;
  CHECK(gen.matrix() == expected);
}

TEST_CASE("build_generator sums duplicate transitions") {
  const auto gen =
      build_generator<double>(StateSpace({"a", "b"}), {{"a", "b", 1.0}, {"a", "b", 0.5}, {"b", "a", 3.0}});
  CHECK(gen.rate("a", "b") == 1.5);
  CHECK(gen.rate("a", "a") == -1.5);
  CHECK(gen.rate("b", "b") == -3.0);
}

TEST_CASE("build_generator errors") {
  CHECK_THROWS_WITH_AS(build_generator<double>(StateSpace({"a", "b"}), {{"a", "c", 1.0}}),
                       doctest::Contains("UnknownState"), Error);
  CHECK_THROWS_WITH_AS(build_generator<double>(StateSpace({"a", "b"}), {{"a", "b", -1.0}}),
                       doctest::Contains("NegativeRate"), Error);
  CHECK_THROWS_AS(StateSpace({"a", "a"}), Error);
  CHECK_THROWS_AS(StateSpace({}), Error);
  Eigen::Matrix2d bad;
  bad << -1.0, 2.0, 0.0, 0.0;
  CHECK_THROWS_AS(Generator<double>(StateSpace({"a", "b"}), bad), Error);
}

TEST_CASE("birth-death generator is tridiagonal") {
  const auto gen = mm1k_generator(1.0, 2.0, 2);
  Eigen::Matrix3d expected;
  expected << -1.0, 1.0, 0.0,  //
      2.0, -3.0, 1.0,          //
      0.0, 2.0, -2.0;
  CHECK(gen.matrix() == expected);
}

TEST_CASE("steady state of a symmetric two-state chain") {
  const auto gen = build_generator<double>(StateSpace({"a", "b"}), {{"a", "b", 1.0}, {"b", "a", 1.0}});
  const auto pi = steady_state(gen);
  CHECK(pi["a"] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(pi["b"] == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("blocking chain for node 1") {
  const auto gen = blocking_node_chain(0.94, 1.0, 0.136, 0.5);
  Eigen::Matrix3d expected;
  expected << -0.94, 0.94, 0.0,  //
      0.5, -1.0, 0.5,            //
      0.136, 0.0, -0.136;
  CHECK((gen.matrix() - expected).cwiseAbs().maxCoeff() < 1e-15);
  check_generator_invariants(gen);

  const auto pi = steady_state(gen);
  CHECK(std::abs(pi[kIdle] - 0.185) <= 0.002);
  CHECK(std::abs(pi[kBusy] - 0.174) <= 0.002);
  CHECK(std::abs(pi[kBlocked] - 0.641) <= 0.002);
}

TEST_CASE("blocking chain limits") {
  SUBCASE("P_b = 0 leaves (0,1) transient") {
    const auto gen = blocking_node_chain(1.0, 1.0, 0.2, 0.0);
    CHECK(gen.rate(kBusy, kBlocked) == 0.0);
    const auto pi = steady_state(gen);
    CHECK(pi[kIdle] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(pi[kBusy] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(pi[kBlocked] == 0.0);
  }
  SUBCASE("P_b = 1 removes the direct departure") {
    const auto gen = blocking_node_chain(1.0, 1.0, 0.2, 1.0);
    CHECK(gen.rate(kBusy, kIdle) == 0.0);
    CHECK(gen.rate(kBusy, kBlocked) == 1.0);
  }
  SUBCASE("parameter errors") {
    CHECK_THROWS_WITH_AS(blocking_node_chain(-1.0, 1.0, 0.2, 0.5), doctest::Contains("NegativeRate"),
                         Error);
    CHECK_THROWS_WITH_AS(blocking_node_chain(1.0, 1.0, 0.2, 1.5),
                         doctest::Contains("ProbabilityOutOfRange"), Error);
    CHECK_THROWS_WITH_AS(blocking_node_closed_form(1.0, 1.0, 0.0, 0.5),
                         doctest::Contains("ZeroRate"), Error);
  }
}

TEST_CASE("closed form against reference marginals") {
  const auto node1 = blocking_node_closed_form(0.94, 1.0, 0.136, 0.5);
  CHECK(std::abs(node1[kIdle] - 0.185) <= 0.002);
  CHECK(std::abs(node1[kBusy] - 0.174) <= 0.002);
  CHECK(std::abs(node1[kBlocked] - 0.641) <= 0.002);
  const auto node4 = blocking_node_closed_form(0.88, 1.0, 0.144, 0.5);
  CHECK(std::abs(node4[kIdle] - 0.203) <= 0.002);
  CHECK(std::abs(node4[kBusy] - 0.178) <= 0.002);
  CHECK(std::abs(node4[kBlocked] - 0.619) <= 0.002);
  const auto unblocked = blocking_node_closed_form(1.0, 1.0, 0.3, 0.0);
  CHECK(unblocked[kIdle] == 0.5);
  CHECK(unblocked[kBusy] == 0.5);
  CHECK(unblocked[kBlocked] == 0.0);
}

TEST_CASE("closed form equals the numeric solve on random parameters") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> rate(0.1, 3.0), unblock(0.05, 1.0), prob(0.0, 1.0);
  for (int draw = 0; draw < 1000; ++draw) {
    const double l = rate(rng), m = rate(rng), mb = unblock(rng), pb = prob(rng);
    const auto numeric = steady_state(blocking_node_chain(l, m, mb, pb));
    const auto closed = blocking_node_closed_form(l, m, mb, pb);
    CHECK((numeric.probabilities() - closed.probabilities()).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("steady state matches power iteration on random irreducible chains") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> rate(0.05, 4.0);
  std::uniform_int_distribution<int> size(2, 8);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = size(rng);
    std::vector<std::string> labels;
    for (int i = 0; i < n; ++i) labels.push_back("s" + std::to_string(i));
    std::vector<Transition<double>> ts;
    for (int i = 0; i < n; ++i) ts.push_back({labels[i], labels[(i + 1) % n], rate(rng)});
    for (int k = 0; k < n; ++k) {
      const int a = size(rng) % n, b = size(rng) % n;
      if (a != b) ts.push_back({labels[a], labels[b], rate(rng)});
    }
    const auto gen = build_generator<double>(StateSpace(labels), ts);
    const auto pi = steady_state(gen);
    const auto ref = oracle::power_iteration(to_dense(gen));
    CHECK(balance_residual(gen, pi.probabilities()) <= 1e-10);
    CHECK(std::abs(pi.probabilities().sum() - 1.0) <= 1e-12);
    for (int i = 0; i < n; ++i) {
      CHECK(pi(i) >= 0.0);
      CHECK(std::abs(pi(i) - ref[i]) <= 1e-9);
    }
  }
}

TEST_CASE("reducible chains are rejected") {
  const auto gen = build_generator<double>(StateSpace({"a", "b", "c"}),
                                           {{"a", "b", 1.0}, {"a", "c", 1.0}});
  CHECK(closed_class_count(gen) == 2);
  CHECK_THROWS_WITH_AS(steady_state(gen), doctest::Contains("Reducible"), Error);
}

TEST_CASE("M/M/1/K full probability") {
  CHECK(mm1k_full_probability(1.0, 1) == 0.5);
  CHECK(mm1k_full_probability(0.0, 1) == 0.0);
  CHECK(mm1k_full_probability(0.0, 5) == 0.0);
  const auto bd = oracle::birth_death(0.5, 1.0, 2);
  CHECK(mm1k_full_probability(0.5, 2) == doctest::Approx(bd[2]).epsilon(1e-14));
  CHECK(mm1k_full_probability(0.5, 2) == doctest::Approx(1.0 / 7.0).epsilon(1e-14));
  CHECK_THROWS_WITH_AS(mm1k_full_probability(-0.1, 2), doctest::Contains("NegativeRho"), Error);
  // Large rho stays finite.
  CHECK(mm1k_full_probability(50.0, 200) == doctest::Approx(1.0 - 1.0 / 50.0).epsilon(1e-12));
}

TEST_CASE("M/M/1/K full probability is continuous at rho = 1") {
  for (int k = 1; k <= 10; ++k) {
    const double limit = 1.0 / (k + 1);
    CHECK(std::abs(mm1k_full_probability(1.0 + 1e-8, k) - limit) <= 1e-6);
    CHECK(std::abs(mm1k_full_probability(1.0 - 1e-8, k) - limit) <= 1e-6);
  }
}

TEST_CASE("M/M/1/K distribution") {
  const auto uniform = mm1k_distribution(1.0, 2);
  for (int i = 0; i < 3; ++i) CHECK(uniform(i) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

  const auto half = mm1k_distribution(0.5, 2);
  CHECK(half["0"] == doctest::Approx(4.0 / 7.0).epsilon(1e-14));
  CHECK(half["1"] == doctest::Approx(2.0 / 7.0).epsilon(1e-14));
  CHECK(half["2"] == doctest::Approx(1.0 / 7.0).epsilon(1e-14));

  for (double rho : {0.0, 0.3, 0.999, 1.0, 1.2, 7.0}) {
    for (int k = 1; k <= 10; ++k) {
      const auto dist = mm1k_distribution(rho, k);
      CHECK(dist(k) == mm1k_full_probability(rho, k));
      CHECK(std::abs(dist.probabilities().sum() - 1.0) <= 1e-12);
      if (rho > 0.0) {
        const auto numeric = steady_state(mm1k_generator(rho, 1.0, k));
        CHECK((numeric.probabilities() - dist.probabilities()).cwiseAbs().maxCoeff() <= 1e-10);
        const auto bd = oracle::birth_death(rho, 1.0, k);
        for (int i = 0; i <= k; ++i) CHECK(std::abs(dist(i) - bd[i]) <= 1e-12);
      }
    }
  }
}

TEST_CASE("templates work with long double") {
  const auto gen = blocking_node_chain<long double>(0.94L, 1.0L, 0.136L, 0.5L);
  const auto pi = steady_state(gen);
  const auto closed = blocking_node_closed_form<long double>(0.94L, 1.0L, 0.136L, 0.5L);
  CHECK(static_cast<double>((pi.probabilities() - closed.probabilities()).cwiseAbs().maxCoeff()) <
        1e-15);
  CHECK(static_cast<double>(mm1k_full_probability<long double>(1.0L, 3)) == 0.25);
}
