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

#include "dpnego/error.hpp"

namespace dpnego {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownPurpose: return "UnknownPurpose";
    case ErrorCode::UnknownFeature: return "UnknownFeature";
    case ErrorCode::EmptyFeatureSet: return "EmptyFeatureSet";
    case ErrorCode::NonPositiveWindow: return "NonPositiveWindow";
    case ErrorCode::NonPositiveEpsilon: return "NonPositiveEpsilon";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::BudgetOverdraft: return "BudgetOverdraft";
    case ErrorCode::FactorMismatch: return "FactorMismatch";
    case ErrorCode::ChainCorrupt: return "ChainCorrupt";
    case ErrorCode::InvalidThreshold: return "InvalidThreshold";
    case ErrorCode::SecretOutOfField: return "SecretOutOfField";
    case ErrorCode::InsufficientShares: return "InsufficientShares";
    case ErrorCode::MixedScheme: return "MixedScheme";
    case ErrorCode::DuplicateIndex: return "DuplicateIndex";
    case ErrorCode::AlreadyAuthorized: return "AlreadyAuthorized";
    case ErrorCode::UnknownContract: return "UnknownContract";
    case ErrorCode::ScopeViolation: return "ScopeViolation";
    case ErrorCode::NonWhitelistedOp: return "NonWhitelistedOp";
    case ErrorCode::ArityExceeded: return "ArityExceeded";
    case ErrorCode::RuntimeBudgetExceeded: return "RuntimeBudgetExceeded";
    case ErrorCode::DataGap: return "DataGap";
    case ErrorCode::NonPositiveSensitivity: return "NonPositiveSensitivity";
    case ErrorCode::UnnoisedOutput: return "UnnoisedOutput";
    case ErrorCode::TokenConsumed: return "TokenConsumed";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::NonMonotoneTimestamps: return "NonMonotoneTimestamps";
    case ErrorCode::MissingDataset: return "MissingDataset";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

namespace {

std::string decorate(ErrorCode code, const std::string& message,
                     std::optional<std::size_t> line) {
  std::string out(to_string(code));
  if (line) out += " at line " + std::to_string(*line);
  if (!message.empty()) out += ": " + message;
  return out;
}

}  // namespace

Error::Error(ErrorCode code, const std::string& message,
             std::optional<std::size_t> line)
    : std::runtime_error(decorate(code, message, line)),
      code_(code),
      line_(line) {}

}  // namespace dpnego
