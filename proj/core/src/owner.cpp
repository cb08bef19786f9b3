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

#include "dpnego/owner.hpp"

#include <sstream>

#include "dpnego/error.hpp"

namespace dpnego {

OwnerState owner_from_json(const Json& j, const TrustConfig& cfg) {
  if (!j.is_object()) {
    throw Error(ErrorCode::SchemaMismatch, "owner state must be an object");
  }
  for (const auto& [key, value] : j.items()) {
    if (key != "owner_id" && key != "ledger" && key != "trust" &&
        key != "audit_head") {
      throw Error(ErrorCode::SchemaMismatch,
                  "unknown field '" + key + "' in owner state");
    }
  }
  OwnerState s;
  s.trust = TrustBook(cfg);
  try {
    s.owner_id = j.at("owner_id").get<std::string>();
    s.ledger = ledger_from_json(j.at("ledger"));
    if (j.contains("trust")) {
      std::ostringstream lines;
      for (const auto& e : j.at("trust")) lines << e.dump() << '\n';
      std::istringstream in(lines.str());
      s.trust = TrustBook::replay(in, cfg);
    }
    if (j.contains("audit_head")) {
      s.audit_head = j.at("audit_head").get<std::string>();
    }
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::SchemaMismatch, e.what());
  }
  return s;
}

Json owner_to_json(const OwnerState& s) {
  std::ostringstream os;
  s.trust.write_events(os);
  Json trust = Json::array();
  std::istringstream in(os.str());
  std::string line;
  while (std::getline(in, line)) trust.push_back(Json::parse(line));
  return Json{{"owner_id", s.owner_id},
              {"ledger", s.ledger},
              {"trust", trust},
              {"audit_head", s.audit_head}};
}

}  // namespace dpnego
