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

#include "qnswap/error.hpp"

namespace qnswap {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::RowSumExceedsOne: return "RowSumExceedsOne";
    case ErrorCode::UnknownNodeReference: return "UnknownNodeReference";
    case ErrorCode::NegativeRate: return "NegativeRate";
    case ErrorCode::ZeroRate: return "ZeroRate";
    case ErrorCode::ClosedNetwork: return "ClosedNetwork";
    case ErrorCode::ProbabilityOutOfRange: return "ProbabilityOutOfRange";
    case ErrorCode::UnknownState: return "UnknownState";
    case ErrorCode::NodeNotIntermediate: return "NodeNotIntermediate";
    case ErrorCode::MissingUnblockRate: return "MissingUnblockRate";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ZeroArrivalRate: return "ZeroArrivalRate";
    case ErrorCode::EmptySubset: return "EmptySubset";
    case ErrorCode::ZeroHorizon: return "ZeroHorizon";
    case ErrorCode::Unreachable: return "Unreachable";
    case ErrorCode::DisconnectedLayout: return "DisconnectedLayout";
    case ErrorCode::NoSource: return "NoSource";
    case ErrorCode::NoSink: return "NoSink";
    case ErrorCode::NegativeRho: return "NegativeRho";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::SingularRouting: return "SingularRouting";
    case ErrorCode::NonConvergent: return "NonConvergent";
    case ErrorCode::Reducible: return "Reducible";
    case ErrorCode::NumericalFailure: return "NumericalFailure";
    case ErrorCode::RngStreamExhausted: return "RngStreamExhausted";
  }
  return "Unknown";
}

ErrorCategory category(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::SingularRouting:
    case ErrorCode::NonConvergent:
    case ErrorCode::Reducible:
    case ErrorCode::NumericalFailure:
    case ErrorCode::RngStreamExhausted:
      return ErrorCategory::Numerical;
    default:
      return ErrorCategory::InvalidInput;
  }
}

}  // namespace qnswap
