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

#include <string>

#include "dpnego/digest.hpp"
#include "dpnego/engine.hpp"
#include "dpnego/json.hpp"
#include "dpnego/scoring.hpp"

namespace dpnego {

// A prosumer's negotiation state: budget, trust towards each requester and
// the head of its audit chain.
struct OwnerState {
  std::string owner_id;
  BudgetLedger ledger{8.0};
  TrustBook trust;
  std::string audit_head{kGenesisHash};
};

// {"owner_id", "ledger": {...}, "trust": [{"requester","event","value"}...],
//  "audit_head"}; only owner_id and ledger are required.
OwnerState owner_from_json(const Json& j, const TrustConfig& cfg);
Json owner_to_json(const OwnerState& s);

}  // namespace dpnego
