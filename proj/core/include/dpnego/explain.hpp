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
#include <optional>
#include <string>
#include <vector>

#include "dpnego/contract.hpp"
#include "dpnego/engine.hpp"
#include "dpnego/json.hpp"

namespace dpnego {

struct ExplainConfig {
  // weights on (1 - risk), utility, trust, cost
  std::array<double, 4> lambdas{0.25, 0.25, 0.25, 0.25};
  double warning_ratio = 0.5;
  // Sensitivity that maps to a normalized risk of 1 at eps_max; defaults to
  // the catalog's total alpha.
  double reference_sensitivity = 2.3;

  void validate() const;
  bool operator==(const ExplainConfig&) const = default;
};

// Each component is normalized to [0,1] over (0, eps_max]. Throws
// NonPositiveEpsilon for eps_star <= 0.
double privacy_utility_score(double eps_star, double s, double t,
                             const EngineConfig& engine,
                             const ExplainConfig& cfg);

struct ParameterChange {
  std::string parameter;
  std::string from;
  std::string to;

  bool operator==(const ParameterChange&) const = default;
};

inline const std::vector<std::string>& reject_suggestions() {
  static const std::vector<std::string> s = {
      "reduce_resolution", "shorten_duration", "reduce_feature_sensitivity"};
  return s;
}

struct Explanation {
  Decision decision = Decision::Reject;
  NegotiationFactors factors;
  std::optional<double> pu_score;
  std::optional<Constraint> violated;
  std::vector<std::string> suggestions;
  std::vector<ParameterChange> changes;
  bool warning_high_consumption = false;
  std::string text;
  std::string trace_id;

  bool operator==(const Explanation&) const = default;
};

// Throws FactorMismatch when the factors' epsilon disagrees with the outcome.
Explanation explain(const ContractRequest& original,
                    const NegotiationOutcome& outcome,
                    const NegotiationFactors& factors,
                    const EngineConfig& engine, const ExplainConfig& cfg);

// Parameters that differ between two requests, in field order.
std::vector<ParameterChange> diff_requests(const ContractRequest& before,
                                           const ContractRequest& after);

void to_json(Json& j, const Explanation& e);
Explanation explanation_from_json(const Json& j);

}  // namespace dpnego
