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

#include <nlohmann/json.hpp>
#include <string_view>

#include "dpnego/contract.hpp"
#include "dpnego/engine.hpp"

namespace dpnego {

using Json = nlohmann::json;

// Parses text, mapping syntax errors to Error{ParseError} with the byte
// offset in the message.
Json parse_json(std::string_view text);

void to_json(Json& j, const ContractRequest& r);
// Strict: unknown fields and missing required fields are errors.
ContractRequest request_from_json(const Json& j);

void to_json(Json& j, const NegotiationOutcome& o);
NegotiationOutcome outcome_from_json(const Json& j);

void to_json(Json& j, const NegotiationFactors& f);
NegotiationFactors factors_from_json(const Json& j);

void to_json(Json& j, const BudgetLedger& l);
BudgetLedger ledger_from_json(const Json& j);

Json features_to_json(const FeatureSet& features);
FeatureSet features_from_json(const Json& j);

}  // namespace dpnego
