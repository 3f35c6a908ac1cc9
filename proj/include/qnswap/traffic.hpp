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

#include <cmath>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "qnswap/error.hpp"
#include "qnswap/model.hpp"

namespace qnswap {

/// Pivots below this magnitude mark (I - P^T) as singular.
inline constexpr double kSingularPivot = 1e-12;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Max-norm residual of lambda_i = lambda0_i + sum_j p_ji lambda_j.
template <typename DerivedP, typename DerivedE, typename DerivedR>
typename DerivedP::Scalar traffic_residual(const Eigen::MatrixBase<DerivedP>& routing,
                                           const Eigen::MatrixBase<DerivedE>& external,
                                           const Eigen::MatrixBase<DerivedR>& rates) {
  if (rates.size() == 0) return typename DerivedP::Scalar(0);
  return (rates - external - routing.transpose() * rates).cwiseAbs().maxCoeff();
}

/// Direct solve of (I - P^T) lambda = lambda0 by LU with partial pivoting.
/// `routing` is the dense N x N matrix with routing(i, j) = p_ij.
template <typename DerivedP, typename DerivedE>
Vector<typename DerivedP::Scalar> solve_traffic_equations(
    const Eigen::MatrixBase<DerivedP>& routing, const Eigen::MatrixBase<DerivedE>& external) {
  using Scalar = typename DerivedP::Scalar;
  const Eigen::Index n = routing.rows();
  if (routing.cols() != n || external.size() != n)
    fail(ErrorCode::DimensionMismatch, "routing matrix and external rates disagree in size");
  if (n == 0) return Vector<Scalar>();

  const Matrix<Scalar> system = Matrix<Scalar>::Identity(n, n) - routing.transpose();
  Eigen::PartialPivLU<Matrix<Scalar>> lu(system);
  using std::abs;
  for (Eigen::Index i = 0; i < n; ++i)
    if (abs(lu.matrixLU()(i, i)) < Scalar(kSingularPivot))
      fail(ErrorCode::SingularRouting, "traffic system has a vanishing pivot");
  return lu.solve(external.derived().template cast<Scalar>());
}

struct FixedPointOptions {
  double damping = 1.0;
  double tolerance = 1e-14;
  std::size_t max_iterations = 1'000'000;
};

/// Damped iteration lambda <- (1 - w) lambda + w (lambda0 + P^T lambda).
template <typename DerivedP, typename DerivedE>
Vector<typename DerivedP::Scalar> fixed_point_traffic(const Eigen::MatrixBase<DerivedP>& routing,
                                                      const Eigen::MatrixBase<DerivedE>& external,
                                                      const FixedPointOptions& options = {}) {
  using Scalar = typename DerivedP::Scalar;
  const Eigen::Index n = routing.rows();
  if (routing.cols() != n || external.size() != n)
    fail(ErrorCode::DimensionMismatch, "routing matrix and external rates disagree in size");
  const Scalar w(options.damping);
  Vector<Scalar> rates = external;
  for (std::size_t it = 0; it < options.max_iterations; ++it) {
    Vector<Scalar> next = (Scalar(1) - w) * rates + w * (external + routing.transpose() * rates);
    const Scalar step = n == 0 ? Scalar(0) : (next - rates).cwiseAbs().maxCoeff();
    const Scalar scale = n == 0 ? Scalar(1) : Scalar(1) + next.cwiseAbs().maxCoeff();
    rates = std::move(next);
    if (step <= Scalar(options.tolerance) * scale) return rates;
  }
  fail(ErrorCode::NonConvergent, "fixed-point traffic iteration exceeded its limit");
}

/// Dense p_ij in node order of `spec`.
Eigen::MatrixXd dense_routing(const NetworkSpec& spec);
/// lambda0 in node order of `spec`.
Eigen::VectorXd external_vector(const NetworkSpec& spec);

struct ArrivalRates {
  std::vector<int> ids;
  Eigen::VectorXd rates;
  double total_external = 0.0;

  double at(int id) const;
};

enum class TrafficMethod { Direct, FixedPoint };

/// Effective arrival rate of every node. Rates listed in
/// spec.known_arrival_rates are returned verbatim; the rest are solved from
/// the traffic equations with the known rates feeding in as extra inflow.
ArrivalRates solve_traffic(const NetworkSpec& spec, TrafficMethod method = TrafficMethod::Direct);

double total_external_rate(const NetworkSpec& spec);

}  // namespace qnswap
