// Copyright 2026 The dpnego Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace dpnego {

enum class ErrorCode {
  // contract validation
  UnknownPurpose,
  UnknownFeature,
  EmptyFeatureSet,
  NonPositiveWindow,
  // scoring / engine
  NonPositiveEpsilon,
  OutOfRange,
  BudgetOverdraft,
  // explanations and audit
  FactorMismatch,
  ChainCorrupt,
  // threshold sharing
  InvalidThreshold,
  SecretOutOfField,
  InsufficientShares,
  MixedScheme,
  DuplicateIndex,
  AlreadyAuthorized,
  UnknownContract,
  // release sandbox
  ScopeViolation,
  NonWhitelistedOp,
  ArityExceeded,
  RuntimeBudgetExceeded,
  DataGap,
  NonPositiveSensitivity,
  UnnoisedOutput,
  TokenConsumed,
  // ingestion
  ParseError,
  SchemaMismatch,
  NonMonotoneTimestamps,
  MissingDataset,
  // plumbing
  InvalidConfig,
  InvalidArgument,
  Io,
};

std::string_view to_string(ErrorCode code);

// All library failures surface as this exception. `line()` is set for
// positioned parse diagnostics (1-based, header included).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<std::size_t> line = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::size_t> line() const noexcept { return line_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> line_;
};

}  // namespace dpnego
