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

#include <array>
#include <chrono>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dpnego {

// Feature categories a request can cover, each carrying a sensitivity weight.
enum class Feature { Location, ApplianceLevel, LoadCurve, Aggregate };
inline constexpr std::array<Feature, 4> kAllFeatures = {
    Feature::Location, Feature::ApplianceLevel, Feature::LoadCurve,
    Feature::Aggregate};

// Temporal resolution, finest first.
enum class Resolution { Min5, Min15, Min30, Hour1, Daily };
inline constexpr std::array<Resolution, 5> kAllResolutions = {
    Resolution::Min5, Resolution::Min15, Resolution::Min30, Resolution::Hour1,
    Resolution::Daily};

enum class Purpose {
  Billing,
  Forecasting,
  GridMonitoring,
  DemandResponse,
  PeerTrading,
  Profiling
};
inline constexpr std::array<Purpose, 6> kAllPurposes = {
    Purpose::Billing,        Purpose::Forecasting, Purpose::GridMonitoring,
    Purpose::DemandResponse, Purpose::PeerTrading, Purpose::Profiling};

enum class RequestMode { OneShot, Periodic, OnDemand };

std::string_view to_string(Feature f);
std::string_view to_string(Resolution r);
std::string_view to_string(Purpose p);
std::string_view to_string(RequestMode m);

// Parsers throw Error{UnknownFeature|UnknownPurpose|InvalidArgument}.
Feature parse_feature(std::string_view s);
Resolution parse_resolution(std::string_view s);
Purpose parse_purpose(std::string_view s);
RequestMode parse_request_mode(std::string_view s);

std::chrono::minutes duration_of(Resolution r);
// Next coarser resolution, or nullopt at Daily.
std::optional<Resolution> coarser(Resolution r);
bool is_finer(Resolution a, Resolution b);

using FeatureSet = std::set<Feature>;

// What an owner exposes plus the fixed scoring tables. Treated as immutable
// once loaded.
struct DataCatalog {
  std::map<Feature, double> alphas;
  std::map<Resolution, double> attenuation;
  std::map<Purpose, double> purpose_scores;

  static DataCatalog defaults();

  // Throws InvalidConfig when a table breaks its range/monotonicity rules.
  void validate() const;

  bool exposes(Feature f) const { return alphas.contains(f); }
  double alpha(Feature f) const;
  double attenuation_of(Resolution r) const;
  double purpose_score(Purpose p) const;
  // Sum of every exposed alpha; the largest raw sensitivity a request can have.
  double total_alpha() const;

  bool operator==(const DataCatalog&) const = default;
};

struct ContractRequest {
  std::string requester_id;
  std::string owner_id;
  FeatureSet features;
  int window_hours = 24;
  Resolution resolution = Resolution::Hour1;
  Purpose purpose = Purpose::Billing;
  std::optional<double> proposed_epsilon;
  std::optional<double> max_noise;
  RequestMode mode = RequestMode::OneShot;

  bool operator==(const ContractRequest&) const = default;
};

// A request that passed validate_request, with its catalog lookups resolved.
class ValidatedRequest {
 public:
  const ContractRequest& request() const { return request_; }
  const std::vector<std::pair<Feature, double>>& alphas() const {
    return alphas_;
  }
  double purpose_score() const { return purpose_score_; }
  double attenuation() const { return attenuation_; }

  bool operator==(const ValidatedRequest&) const = default;

 private:
  friend ValidatedRequest validate_request(const ContractRequest&,
                                           const DataCatalog&);
  ValidatedRequest() = default;

  ContractRequest request_;
  std::vector<std::pair<Feature, double>> alphas_;
  double purpose_score_ = 0.0;
  double attenuation_ = 1.0;
};

// Throws EmptyFeatureSet, NonPositiveWindow, UnknownFeature, UnknownPurpose,
// or InvalidArgument (non-positive proposed_epsilon / max_noise).
ValidatedRequest validate_request(const ContractRequest& request,
                                  const DataCatalog& catalog);

// Request templates for common energy-data contracts.
struct ContractPreset {
  std::string name;
  std::string data_type;
  FeatureSet features;
  Resolution resolution;
  int window_hours;
  double epsilon;
  Purpose purpose;
  std::string output;
  RequestMode mode;
  std::string filters;

  ContractRequest to_request(std::string requester_id,
                             std::string owner_id) const;
};

const std::vector<ContractPreset>& builtin_presets();
// Throws InvalidArgument for an unknown name.
const ContractPreset& find_preset(std::string_view name);

enum class Decision { Approve, CounterOffer, Reject };

// Inequalities the negotiation can report as violated.
enum class Constraint { SafetyCondition, BelowMinimum, BudgetExceeded };

std::string_view to_string(Decision d);
std::string_view to_string(Constraint c);
Decision parse_decision(std::string_view s);
Constraint parse_constraint(std::string_view s);

class NegotiationOutcome {
 public:
  static NegotiationOutcome approve(double epsilon_star);
  static NegotiationOutcome counter_offer(ContractRequest modified,
                                          double epsilon_star);
  static NegotiationOutcome reject(Constraint violated);

  Decision decision() const { return decision_; }
  const std::optional<double>& epsilon_star() const { return epsilon_star_; }
  const std::optional<ContractRequest>& modified_request() const {
    return modified_request_;
  }
  const std::optional<Constraint>& violated() const { return violated_; }

  bool operator==(const NegotiationOutcome&) const = default;

 private:
  NegotiationOutcome() = default;

  Decision decision_ = Decision::Reject;
  std::optional<double> epsilon_star_;
  std::optional<ContractRequest> modified_request_;
  std::optional<Constraint> violated_;
};

}  // namespace dpnego
