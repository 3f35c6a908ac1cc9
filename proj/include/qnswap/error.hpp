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

#include <stdexcept>
#include <string>
#include <string_view>

namespace qnswap {

enum class ErrorCode {
  // input
  SyntaxError,
  SchemaError,
  RowSumExceedsOne,
  UnknownNodeReference,
  NegativeRate,
  ZeroRate,
  ClosedNetwork,
  ProbabilityOutOfRange,
  UnknownState,
  NodeNotIntermediate,
  MissingUnblockRate,
  DimensionMismatch,
  ZeroArrivalRate,
  EmptySubset,
  ZeroHorizon,
  Unreachable,
  DisconnectedLayout,
  NoSource,
  NoSink,
  NegativeRho,
  InvalidArgument,
  // numerics
  SingularRouting,
  NonConvergent,
  Reducible,
  NumericalFailure,
  RngStreamExhausted,
};

/// Broad class of a failure; the CLI maps it to an exit status.
enum class ErrorCategory { InvalidInput, Numerical };

std::string_view to_string(ErrorCode code) noexcept;
ErrorCategory category(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail),
        code_(code),
        detail_(detail) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& detail) {
  throw Error(code, detail);
}

}  // namespace qnswap
