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

#include "dpnego/json.hpp"

#include <set>
#include <string>

#include "dpnego/error.hpp"

namespace dpnego {

Json parse_json(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::ParseError,
                "malformed JSON at byte " + std::to_string(e.byte));
  }
}

namespace {

void reject_unknown(const Json& j, const std::set<std::string>& allowed,
                    std::string_view what) {
  if (!j.is_object()) {
    throw Error(ErrorCode::SchemaMismatch,
                std::string(what) + " must be a JSON object");
  }
  for (const auto& [key, value] : j.items()) {
    if (!allowed.contains(key)) {
      throw Error(ErrorCode::SchemaMismatch,
                  "unknown field '" + key + "' in " + std::string(what));
    }
  }
}

template <typename T>
T field(const Json& j, const char* name) {
  try {
    return j.at(name).get<T>();
  } catch (const Json::exception&) {
    throw Error(ErrorCode::SchemaMismatch,
                std::string("missing or mistyped field '") + name + "'");
  }
}

std::optional<double> optional_number(const Json& j, const char* name) {
  auto it = j.find(name);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_number()) {
    throw Error(ErrorCode::SchemaMismatch,
                std::string("field '") + name + "' must be a number");
  }
  return it->get<double>();
}

}  // namespace

Json features_to_json(const FeatureSet& features) {
  Json arr = Json::array();
  for (Feature f : features) arr.push_back(to_string(f));
  return arr;
}

FeatureSet features_from_json(const Json& j) {
  if (!j.is_array()) {
    throw Error(ErrorCode::SchemaMismatch, "features must be an array");
  }
  FeatureSet out;
  for (const auto& f : j) {
    if (!f.is_string()) {
      throw Error(ErrorCode::SchemaMismatch, "feature names must be strings");
    }
    out.insert(parse_feature(f.get<std::string>()));
  }
  return out;
}

void to_json(Json& j, const ContractRequest& r) {
  j = Json{{"requester_id", r.requester_id},
           {"owner_id", r.owner_id},
           {"features", features_to_json(r.features)},
           {"window_hours", r.window_hours},
           {"resolution", to_string(r.resolution)},
           {"purpose", to_string(r.purpose)},
           {"proposed_epsilon", nullptr},
           {"max_noise", nullptr},
           {"mode", to_string(r.mode)}};
  if (r.proposed_epsilon) j["proposed_epsilon"] = *r.proposed_epsilon;
  if (r.max_noise) j["max_noise"] = *r.max_noise;
}

ContractRequest request_from_json(const Json& j) {
  reject_unknown(j,
                 {"requester_id", "owner_id", "features", "window_hours",
                  "resolution", "purpose", "proposed_epsilon", "max_noise",
                  "mode"},
                 "request");
  ContractRequest r;
  r.requester_id = field<std::string>(j, "requester_id");
  r.owner_id = field<std::string>(j, "owner_id");
  if (!j.contains("features")) {
    throw Error(ErrorCode::SchemaMismatch, "missing field 'features'");
  }
  r.features = features_from_json(j.at("features"));
  r.window_hours = field<int>(j, "window_hours");
  r.resolution = parse_resolution(field<std::string>(j, "resolution"));
  r.purpose = parse_purpose(field<std::string>(j, "purpose"));
  r.proposed_epsilon = optional_number(j, "proposed_epsilon");
  r.max_noise = optional_number(j, "max_noise");
  if (j.contains("mode")) {
    r.mode = parse_request_mode(field<std::string>(j, "mode"));
  }
  return r;
}

void to_json(Json& j, const NegotiationOutcome& o) {
  j = Json{{"decision", to_string(o.decision())}};
  if (o.epsilon_star()) j["epsilon_star"] = *o.epsilon_star();
  if (o.modified_request()) j["modified_request"] = *o.modified_request();
  if (o.violated()) j["violated"] = to_string(*o.violated());
}

NegotiationOutcome outcome_from_json(const Json& j) {
  reject_unknown(j, {"decision", "epsilon_star", "modified_request", "violated"},
                 "outcome");
  switch (parse_decision(field<std::string>(j, "decision"))) {
    case Decision::Approve:
      return NegotiationOutcome::approve(field<double>(j, "epsilon_star"));
    case Decision::CounterOffer:
      return NegotiationOutcome::counter_offer(
          request_from_json(j.at("modified_request")),
          field<double>(j, "epsilon_star"));
    case Decision::Reject:
      return NegotiationOutcome::reject(
          parse_constraint(field<std::string>(j, "violated")));
  }
  throw Error(ErrorCode::SchemaMismatch, "bad decision");
}

void to_json(Json& j, const NegotiationFactors& f) {
  j = Json{{"s_eff", f.s_eff},
           {"trust", f.trust},
           {"purpose", f.purpose},
           {"h_remaining", f.h_remaining},
           {"epsilon_star", nullptr}};
  if (f.epsilon_star) j["epsilon_star"] = *f.epsilon_star;
}

NegotiationFactors factors_from_json(const Json& j) {
  reject_unknown(j, {"s_eff", "trust", "purpose", "h_remaining", "epsilon_star"},
                 "factors");
  NegotiationFactors f;
  f.s_eff = field<double>(j, "s_eff");
  f.trust = field<double>(j, "trust");
  f.purpose = field<double>(j, "purpose");
  f.h_remaining = field<double>(j, "h_remaining");
  f.epsilon_star = optional_number(j, "epsilon_star");
  return f;
}

void to_json(Json& j, const BudgetLedger& l) {
  Json granted = Json::array();
  for (const auto& [id, eps] : l.granted()) {
    granted.push_back({{"contract_id", id}, {"epsilon", eps}});
  }
  j = Json{{"h_max", l.h_max()},
           {"h_remaining", l.h_remaining()},
           {"granted", granted}};
}

BudgetLedger ledger_from_json(const Json& j) {
  reject_unknown(j, {"h_max", "h_remaining", "granted"}, "ledger");
  BudgetLedger ledger(field<double>(j, "h_max"));
  if (j.contains("granted")) {
    for (const auto& g : j.at("granted")) {
      ledger.settle(field<std::string>(g, "contract_id"),
                    field<double>(g, "epsilon"));
    }
  }
  // A bare h_remaining (no grant history) is recorded as one opaque grant.
  if (j.contains("h_remaining")) {
    const double want = field<double>(j, "h_remaining");
    const double gap = ledger.h_remaining() - want;
    if (gap < -kBudgetTolerance || want < 0.0) {
      throw Error(ErrorCode::SchemaMismatch,
                  "h_remaining inconsistent with grants");
    }
    if (gap > kBudgetTolerance) ledger.settle("prior-grants", gap);
  }
  return ledger;
}

}  // namespace dpnego
