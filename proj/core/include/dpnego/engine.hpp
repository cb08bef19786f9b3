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
#include <utility>
#include <vector>

#include "dpnego/contract.hpp"

namespace dpnego {

enum class ObjectiveMode { Experimental, Generic };

std::string_view to_string(ObjectiveMode m);
ObjectiveMode parse_objective_mode(std::string_view s);

// coef * eps^exponent
struct PowerTerm {
  double coef = 1.0;
  double exponent = 1.0;

  double operator()(double eps) const;
  bool operator==(const PowerTerm&) const = default;
};

// Component functions of the generic objective. The risk term is multiplied
// by the effective sensitivity.
struct ObjectiveComponents {
  PowerTerm utility{2.0, 0.5};
  PowerTerm risk{1.8, 1.7};
  PowerTerm cost{0.15, 1.0};

  bool operator==(const ObjectiveComponents&) const = default;
};

// One row of the epsilon-floor table: applies when S <= max_sensitivity and
// the purpose matches (or no purpose is given). First matching row wins.
struct EpsMinRule {
  double max_sensitivity = 0.0;
  std::optional<Purpose> purpose;
  double eps_min = 0.05;

  bool operator==(const EpsMinRule&) const = default;
};

struct EngineConfig {
  // utility, risk, trust, purpose, cost
  std::array<double, 5> lambdas{1.0, 1.0, 1.0, 0.8, 1.0};
  ObjectiveMode objective = ObjectiveMode::Experimental;
  ObjectiveComponents components;
  double eps_max = 10.0;
  double grid_step = 1e-3;
  std::vector<EpsMinRule> eps_min_table;
  double default_eps_min = 0.05;
  double counter_factor = 0.25;
  double trusted_min_trust = 0.8;
  double trusted_max_sensitivity = 0.5;
  double safety_factor = 4.0;
  // Multiplier on effective sensitivity (risk modes in experiments).
  double sensitivity_scale = 1.0;

  void validate() const;
  double eps_min(double s, Purpose p) const;

  bool operator==(const EngineConfig&) const = default;
};

// Throws NonPositiveEpsilon for eps <= 0.
double objective(double eps, double s, double t, double p,
                 const EngineConfig& cfg);

// Slack used when comparing epsilons against budgets and targets.
inline constexpr double kBudgetTolerance = 1e-9;

class BudgetLedger {
 public:
  explicit BudgetLedger(double h_max = 8.0);

  double h_max() const { return h_max_; }
  double h_remaining() const { return h_remaining_; }
  const std::vector<std::pair<std::string, double>>& granted() const {
    return granted_;
  }
  double total_granted() const;

  // Throws BudgetOverdraft when eps exceeds the remaining budget and
  // NonPositiveEpsilon for eps <= 0.
  void settle(const std::string& contract_id, double eps);

  bool operator==(const BudgetLedger&) const = default;

 private:
  double h_max_;
  double h_remaining_;
  std::vector<std::pair<std::string, double>> granted_;
};

// Free-function form; builds a fresh grid each call.
std::optional<double> optimize_epsilon(double s, double t, double p,
                                       const EngineConfig& cfg,
                                       double h_remaining);

// Effective sensitivity: attenuation(resolution) * sum(alpha).
double effective_sensitivity(const ValidatedRequest& req);

// Empty when feasible, else the violated inequality.
std::optional<Constraint> check_feasibility(double eps_star, double s,
                                            Purpose p, double h_remaining,
                                            const EngineConfig& cfg);

struct CounterProposal {
  ContractRequest request;
  double s_eff = 0.0;  // unscaled effective sensitivity of the proposal
};

std::optional<CounterProposal> derive_counter_offer(const ValidatedRequest& req,
                                                    const DataCatalog& catalog,
                                                    const EngineConfig& cfg);

// Inputs the decision was computed from.
struct NegotiationFactors {
  double s_eff = 0.0;  // scaled effective sensitivity of the original request
  double trust = 0.0;
  double purpose = 0.0;
  double h_remaining = 0.0;
  std::optional<double> epsilon_star;

  bool operator==(const NegotiationFactors&) const = default;
};

// Truth values of every threshold the pipeline tested.
struct DecisionPredicates {
  bool safe = true;               // H >= safety_factor * S
  bool initial_feasible = false;  // eps* within [eps_min, H]
  bool counter_derived = false;   // S' <= counter_factor * S reachable
  bool counter_feasible = false;
  bool trusted_eligible = false;

  bool operator==(const DecisionPredicates&) const = default;
};

struct NegotiationTrace {
  NegotiationOutcome outcome;
  NegotiationFactors factors;
  DecisionPredicates predicates;
  double eps_min = 0.0;
  std::optional<double> counter_s_eff;  // scaled
};

// Holds the objective grid so repeated negotiations skip the pow() calls.
class Engine {
 public:
  Engine(EngineConfig cfg, DataCatalog catalog);

  const EngineConfig& config() const { return cfg_; }
  const DataCatalog& catalog() const { return catalog_; }

  // Grid argmax over (0, min(eps_max, h_remaining, cap)]; ties go to the
  // smaller epsilon.
  std::optional<double> optimize(double s, double h_remaining,
                                 std::optional<double> cap = {}) const;

  NegotiationOutcome negotiate(const ValidatedRequest& req,
                               const BudgetLedger& ledger, double trust) const;
  NegotiationTrace negotiate_traced(const ValidatedRequest& req,
                                    double h_remaining, double trust) const;
  // Same pipeline with explicit multipliers on T and S (robustness probe).
  NegotiationTrace negotiate_traced(const ValidatedRequest& req,
                                    double h_remaining, double trust,
                                    double sensitivity_multiplier) const;

 private:
  double value_at(double eps, double s) const;

  EngineConfig cfg_;
  DataCatalog catalog_;
  // Grid point k (1-based) holds eps = k * step; base = utility - cost,
  // risk is multiplied by S at query time.
  std::vector<double> base_;
  std::vector<double> risk_;
};

}  // namespace dpnego
