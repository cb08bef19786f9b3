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

#include "dpnego/contract.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dpnego/error.hpp"

namespace dpnego {

namespace {

template <typename Enum, std::size_t N>
Enum parse_enum(std::string_view s, const std::array<Enum, N>& all,
                ErrorCode code, std::string_view what) {
  for (Enum e : all) {
    if (to_string(e) == s) return e;
  }
  throw Error(code, "unknown " + std::string(what) + " '" + std::string(s) +
                        "'");
}

}  // namespace

std::string_view to_string(Feature f) {
  switch (f) {
    case Feature::Location: return "Location";
    case Feature::ApplianceLevel: return "ApplianceLevel";
    case Feature::LoadCurve: return "LoadCurve";
    case Feature::Aggregate: return "Aggregate";
  }
  return "?";
}

std::string_view to_string(Resolution r) {
  switch (r) {
    case Resolution::Min5: return "Min5";
    case Resolution::Min15: return "Min15";
    case Resolution::Min30: return "Min30";
    case Resolution::Hour1: return "Hour1";
    case Resolution::Daily: return "Daily";
  }
  return "?";
}

std::string_view to_string(Purpose p) {
  switch (p) {
    case Purpose::Billing: return "Billing";
    case Purpose::Forecasting: return "Forecasting";
    case Purpose::GridMonitoring: return "GridMonitoring";
    case Purpose::DemandResponse: return "DemandResponse";
    case Purpose::PeerTrading: return "PeerTrading";
    case Purpose::Profiling: return "Profiling";
  }
  return "?";
}

std::string_view to_string(RequestMode m) {
  switch (m) {
    case RequestMode::OneShot: return "OneShot";
    case RequestMode::Periodic: return "Periodic";
    case RequestMode::OnDemand: return "OnDemand";
  }
  return "?";
}

std::string_view to_string(Decision d) {
  switch (d) {
    case Decision::Approve: return "Approve";
    case Decision::CounterOffer: return "CounterOffer";
    case Decision::Reject: return "Reject";
  }
  return "?";
}

std::string_view to_string(Constraint c) {
  switch (c) {
    case Constraint::SafetyCondition: return "SafetyCondition";
    case Constraint::BelowMinimum: return "BelowMinimum";
    case Constraint::BudgetExceeded: return "BudgetExceeded";
  }
  return "?";
}

Feature parse_feature(std::string_view s) {
  return parse_enum(s, kAllFeatures, ErrorCode::UnknownFeature, "feature");
}

Resolution parse_resolution(std::string_view s) {
  return parse_enum(s, kAllResolutions, ErrorCode::InvalidArgument,
                    "resolution");
}

Purpose parse_purpose(std::string_view s) {
  return parse_enum(s, kAllPurposes, ErrorCode::UnknownPurpose, "purpose");
}

RequestMode parse_request_mode(std::string_view s) {
  static constexpr std::array<RequestMode, 3> all = {
      RequestMode::OneShot, RequestMode::Periodic, RequestMode::OnDemand};
  return parse_enum(s, all, ErrorCode::InvalidArgument, "mode");
}

Decision parse_decision(std::string_view s) {
  static constexpr std::array<Decision, 3> all = {
      Decision::Approve, Decision::CounterOffer, Decision::Reject};
  return parse_enum(s, all, ErrorCode::InvalidArgument, "decision");
}

Constraint parse_constraint(std::string_view s) {
  static constexpr std::array<Constraint, 3> all = {
      Constraint::SafetyCondition, Constraint::BelowMinimum,
      Constraint::BudgetExceeded};
  return parse_enum(s, all, ErrorCode::InvalidArgument, "constraint");
}

std::chrono::minutes duration_of(Resolution r) {
  using std::chrono::minutes;
  switch (r) {
    case Resolution::Min5: return minutes(5);
    case Resolution::Min15: return minutes(15);
    case Resolution::Min30: return minutes(30);
    case Resolution::Hour1: return minutes(60);
    case Resolution::Daily: return minutes(24 * 60);
  }
  return minutes(0);
}

std::optional<Resolution> coarser(Resolution r) {
  switch (r) {
    case Resolution::Min5: return Resolution::Min15;
    case Resolution::Min15: return Resolution::Min30;
    case Resolution::Min30: return Resolution::Hour1;
    case Resolution::Hour1: return Resolution::Daily;
    case Resolution::Daily: return std::nullopt;
  }
  return std::nullopt;
}

bool is_finer(Resolution a, Resolution b) {
  return duration_of(a) < duration_of(b);
}

DataCatalog DataCatalog::defaults() {
  DataCatalog c;
  c.alphas = {{Feature::Location, 1.0},
              {Feature::ApplianceLevel, 0.7},
              {Feature::LoadCurve, 0.4},
              {Feature::Aggregate, 0.2}};
  c.attenuation = {{Resolution::Min5, 1.0},
                   {Resolution::Min15, 0.9},
                   {Resolution::Min30, 0.8},
                   {Resolution::Hour1, 0.6},
                   {Resolution::Daily, 0.3}};
  c.purpose_scores = {{Purpose::Billing, 1.0},
                      {Purpose::Forecasting, 0.8},
                      {Purpose::GridMonitoring, 0.75},
                      {Purpose::DemandResponse, 0.7},
                      {Purpose::PeerTrading, 0.6},
                      {Purpose::Profiling, 0.1}};
  return c;
}

void DataCatalog::validate() const {
  for (const auto& [f, a] : alphas) {
    if (!(a >= 0.0 && a <= 1.0)) {
      throw Error(ErrorCode::InvalidConfig,
                  "alpha for " + std::string(to_string(f)) + " outside [0,1]");
    }
  }
  for (const auto& [p, s] : purpose_scores) {
    if (!(s >= 0.0 && s <= 1.0)) {
      throw Error(ErrorCode::InvalidConfig,
                  "purpose score for " + std::string(to_string(p)) +
                      " outside [0,1]");
    }
  }
  // Every resolution needs an attenuation, strictly decreasing with
  // coarseness and exactly 1 at the finest step.
  double previous = 0.0;
  for (Resolution r : kAllResolutions) {
    auto it = attenuation.find(r);
    if (it == attenuation.end()) {
      throw Error(ErrorCode::InvalidConfig,
                  "missing attenuation for " + std::string(to_string(r)));
    }
    const double a = it->second;
    if (!(a > 0.0 && a <= 1.0)) {
      throw Error(ErrorCode::InvalidConfig, "attenuation outside (0,1]");
    }
    if (r == Resolution::Min5 && a != 1.0) {
      throw Error(ErrorCode::InvalidConfig, "Min5 attenuation must be 1.0");
    }
    if (r != Resolution::Min5 && !(a < previous)) {
      throw Error(ErrorCode::InvalidConfig,
                  "attenuation must decrease with coarseness");
    }
    previous = a;
  }
}

double DataCatalog::alpha(Feature f) const {
  auto it = alphas.find(f);
  if (it == alphas.end()) {
    throw Error(ErrorCode::UnknownFeature,
                std::string(to_string(f)) + " is not exposed by the catalog");
  }
  return it->second;
}

double DataCatalog::attenuation_of(Resolution r) const {
  auto it = attenuation.find(r);
  if (it == attenuation.end()) {
    throw Error(ErrorCode::InvalidConfig,
                "no attenuation for " + std::string(to_string(r)));
  }
  return it->second;
}

double DataCatalog::purpose_score(Purpose p) const {
  auto it = purpose_scores.find(p);
  if (it == purpose_scores.end()) {
    throw Error(ErrorCode::UnknownPurpose,
                std::string(to_string(p)) + " has no compatibility score");
  }
  return it->second;
}

double DataCatalog::total_alpha() const {
  double total = 0.0;
  for (const auto& [f, a] : alphas) total += a;
  return total;
}

ValidatedRequest validate_request(const ContractRequest& request,
                                  const DataCatalog& catalog) {
  if (request.features.empty()) {
    throw Error(ErrorCode::EmptyFeatureSet, "request lists no features");
  }
  if (request.window_hours < 1) {
    throw Error(ErrorCode::NonPositiveWindow,
                "window_hours = " + std::to_string(request.window_hours));
  }
  if (request.proposed_epsilon &&
      !(*request.proposed_epsilon > 0.0 &&
        std::isfinite(*request.proposed_epsilon))) {
    throw Error(ErrorCode::NonPositiveEpsilon, "proposed_epsilon must be > 0");
  }
  if (request.max_noise &&
      !(*request.max_noise > 0.0 && std::isfinite(*request.max_noise))) {
    throw Error(ErrorCode::InvalidArgument, "max_noise must be > 0");
  }

  ValidatedRequest v;
  v.request_ = request;
  for (Feature f : request.features) {
    v.alphas_.emplace_back(f, catalog.alpha(f));
  }
  v.purpose_score_ = catalog.purpose_score(request.purpose);
  v.attenuation_ = catalog.attenuation_of(request.resolution);
  return v;
}

ContractRequest ContractPreset::to_request(std::string requester_id,
                                           std::string owner_id) const {
  ContractRequest r;
  r.requester_id = std::move(requester_id);
  r.owner_id = std::move(owner_id);
  r.features = features;
  r.window_hours = window_hours;
  r.resolution = resolution;
  r.purpose = purpose;
  r.proposed_epsilon = epsilon;
  r.mode = mode;
  return r;
}

const std::vector<ContractPreset>& builtin_presets() {
  // Flexibility data is carried by the ApplianceLevel category.
  static const std::vector<ContractPreset> presets = {
      {"Base", "HH load", {Feature::LoadCurve}, Resolution::Min15, 30 * 24,
       4.0, Purpose::GridMonitoring, "Aggregates", RequestMode::Periodic, ""},
      {"Settlement", "Agg. load", {Feature::Aggregate}, Resolution::Hour1,
       60 * 24, 2.0, Purpose::Billing, "Billing", RequestMode::OneShot, ""},
      {"Forecast", "Smoothed agg.", {Feature::Aggregate}, Resolution::Min30,
       14 * 24, 3.0, Purpose::Forecasting, "Stats", RequestMode::Periodic,
       ""},
      {"DR", "Load + flex.", {Feature::LoadCurve, Feature::ApplianceLevel},
       Resolution::Min5, 4, 5.5, Purpose::DemandResponse, "Events",
       RequestMode::OnDemand, "Peaks"},
  };
  return presets;
}

const ContractPreset& find_preset(std::string_view name) {
  for (const auto& p : builtin_presets()) {
    if (p.name == name) return p;
  }
  throw Error(ErrorCode::InvalidArgument,
              "unknown preset '" + std::string(name) + "'");
}

NegotiationOutcome NegotiationOutcome::approve(double epsilon_star) {
  if (!(epsilon_star > 0.0)) {
    throw Error(ErrorCode::NonPositiveEpsilon, "approval needs epsilon > 0");
  }
  NegotiationOutcome o;
  o.decision_ = Decision::Approve;
  o.epsilon_star_ = epsilon_star;
  return o;
}

NegotiationOutcome NegotiationOutcome::counter_offer(ContractRequest modified,
                                                     double epsilon_star) {
  if (!(epsilon_star > 0.0)) {
    throw Error(ErrorCode::NonPositiveEpsilon,
                "counter-offer needs epsilon > 0");
  }
  NegotiationOutcome o;
  o.decision_ = Decision::CounterOffer;
  o.epsilon_star_ = epsilon_star;
  o.modified_request_ = std::move(modified);
  return o;
}

NegotiationOutcome NegotiationOutcome::reject(Constraint violated) {
  NegotiationOutcome o;
  o.decision_ = Decision::Reject;
  o.violated_ = violated;
  return o;
}

}  // namespace dpnego
