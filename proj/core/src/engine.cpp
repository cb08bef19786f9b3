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

#include "dpnego/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dpnego/error.hpp"
#include "dpnego/scoring.hpp"

namespace dpnego {

std::string_view to_string(ObjectiveMode m) {
  return m == ObjectiveMode::Experimental ? "Experimental" : "Generic";
}

ObjectiveMode parse_objective_mode(std::string_view s) {
  if (s == "Experimental") return ObjectiveMode::Experimental;
  if (s == "Generic") return ObjectiveMode::Generic;
  throw Error(ErrorCode::InvalidConfig,
              "unknown objective '" + std::string(s) + "'");
}

double PowerTerm::operator()(double eps) const {
  if (exponent == 1.0) return coef * eps;
  if (exponent == 0.5) return coef * std::sqrt(eps);
  return coef * std::pow(eps, exponent);
}

void EngineConfig::validate() const {
  for (double l : lambdas) {
    if (!(l >= 0.0)) throw Error(ErrorCode::InvalidConfig, "lambda < 0");
  }
  if (!(grid_step > 0.0 && eps_max > grid_step)) {
    throw Error(ErrorCode::InvalidConfig, "need eps_max > grid_step > 0");
  }
  if (!(counter_factor > 0.0 && counter_factor < 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "counter_factor outside (0,1)");
  }
  if (!(default_eps_min > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "eps_min must be > 0");
  }
  for (const auto& rule : eps_min_table) {
    if (!(rule.eps_min > 0.0)) {
      throw Error(ErrorCode::InvalidConfig, "eps_min rule must be > 0");
    }
  }
  if (!(safety_factor >= 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "safety_factor < 0");
  }
  if (!(sensitivity_scale > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "sensitivity_scale must be > 0");
  }
}

double EngineConfig::eps_min(double s, Purpose p) const {
  for (const auto& rule : eps_min_table) {
    if (s <= rule.max_sensitivity && (!rule.purpose || *rule.purpose == p)) {
      return rule.eps_min;
    }
  }
  return default_eps_min;
}

namespace {

double base_term(double eps, const EngineConfig& cfg) {
  if (cfg.objective == ObjectiveMode::Experimental) {
    return 2.0 * std::sqrt(eps) - 0.15 * eps;
  }
  return cfg.lambdas[0] * cfg.components.utility(eps) -
         cfg.lambdas[4] * cfg.components.cost(eps);
}

double risk_term(double eps, const EngineConfig& cfg) {
  if (cfg.objective == ObjectiveMode::Experimental) {
    return 1.8 * std::pow(eps, 1.7);
  }
  return cfg.lambdas[1] * cfg.components.risk(eps);
}

}  // namespace

double objective(double eps, double s, double t, double p,
                 const EngineConfig& cfg) {
  if (!(eps > 0.0)) {
    throw Error(ErrorCode::NonPositiveEpsilon, "objective needs eps > 0");
  }
  if (cfg.objective == ObjectiveMode::Experimental) {
    return 2.0 * std::sqrt(eps) - 1.8 * s * std::pow(eps, 1.7) + 1.0 * t +
           0.8 * p - 0.15 * eps;
  }
  return base_term(eps, cfg) - s * risk_term(eps, cfg) + cfg.lambdas[2] * t +
         cfg.lambdas[3] * p;
}

BudgetLedger::BudgetLedger(double h_max) : h_max_(h_max), h_remaining_(h_max) {
  if (!(h_max > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "initial budget must be > 0");
  }
}

double BudgetLedger::total_granted() const {
  double total = 0.0;
  for (const auto& g : granted_) total += g.second;
  return total;
}

void BudgetLedger::settle(const std::string& contract_id, double eps) {
  if (!(eps > 0.0)) {
    throw Error(ErrorCode::NonPositiveEpsilon, "grant must be > 0");
  }
  if (eps > h_remaining_ + kBudgetTolerance) {
    throw Error(ErrorCode::BudgetOverdraft,
                "grant " + std::to_string(eps) + " exceeds remaining " +
                    std::to_string(h_remaining_));
  }
  granted_.emplace_back(contract_id, eps);
  h_remaining_ -= eps;
  if (h_remaining_ < kBudgetTolerance) h_remaining_ = 0.0;
}

std::optional<double> optimize_epsilon(double s, double t, double p,
                                       const EngineConfig& cfg,
                                       double h_remaining) {
  (void)t;  // T and P shift the objective by a constant only
  (void)p;
  return Engine(cfg, DataCatalog::defaults()).optimize(s, h_remaining);
}

double effective_sensitivity(const ValidatedRequest& req) {
  double s = 0.0;
  for (const auto& [f, a] : req.alphas()) s += a;
  return req.attenuation() * s;
}

std::optional<Constraint> check_feasibility(double eps_star, double s,
                                            Purpose p, double h_remaining,
                                            const EngineConfig& cfg) {
  if (eps_star < cfg.eps_min(s, p) - kBudgetTolerance) {
    return Constraint::BelowMinimum;
  }
  if (eps_star > h_remaining + kBudgetTolerance) {
    return Constraint::BudgetExceeded;
  }
  return std::nullopt;
}

namespace {

double raw_effective(const FeatureSet& features, Resolution r,
                     const DataCatalog& catalog) {
  return catalog.attenuation_of(r) * sensitivity_score(features, catalog);
}

std::vector<Feature> by_descending_alpha(const FeatureSet& features,
                                         const DataCatalog& catalog) {
  std::vector<Feature> order(features.begin(), features.end());
  std::stable_sort(order.begin(), order.end(), [&](Feature a, Feature b) {
    return catalog.alpha(a) > catalog.alpha(b);
  });
  return order;
}

}  // namespace

std::optional<CounterProposal> derive_counter_offer(const ValidatedRequest& req,
                                                    const DataCatalog& catalog,
                                                    const EngineConfig& cfg) {
  const double original = effective_sensitivity(req);
  if (!(original > 0.0)) return std::nullopt;
  const double target = cfg.counter_factor * original + kBudgetTolerance;

  ContractRequest cur = req.request();
  auto accept = [&]() -> std::optional<CounterProposal> {
    const double s = raw_effective(cur.features, cur.resolution, catalog);
    if (s <= target) return CounterProposal{cur, s};
    return std::nullopt;
  };

  while (auto next = coarser(cur.resolution)) {
    cur.resolution = *next;
    if (auto hit = accept()) return hit;
  }
  if (catalog.exposes(Feature::Aggregate)) {
    for (Feature f : by_descending_alpha(cur.features, catalog)) {
      if (f == Feature::Aggregate) continue;
      cur.features.erase(f);
      cur.features.insert(Feature::Aggregate);
      if (auto hit = accept()) return hit;
    }
  }
  for (Feature f : by_descending_alpha(cur.features, catalog)) {
    if (cur.features.size() <= 1) break;
    cur.features.erase(f);
    if (auto hit = accept()) return hit;
  }
  return std::nullopt;
}

Engine::Engine(EngineConfig cfg, DataCatalog catalog)
    : cfg_(std::move(cfg)), catalog_(std::move(catalog)) {
  cfg_.validate();
  catalog_.validate();
  const auto points =
      static_cast<std::size_t>(std::floor(cfg_.eps_max / cfg_.grid_step + 0.5));
  base_.resize(points);
  risk_.resize(points);
  for (std::size_t k = 1; k <= points; ++k) {
    const double eps = static_cast<double>(k) * cfg_.grid_step;
    base_[k - 1] = base_term(eps, cfg_);
    risk_[k - 1] = risk_term(eps, cfg_);
  }
}

double Engine::value_at(double eps, double s) const {
  return base_term(eps, cfg_) - s * risk_term(eps, cfg_);
}

std::optional<double> Engine::optimize(double s, double h_remaining,
                                       std::optional<double> cap) const {
  double bound = std::min(cfg_.eps_max, h_remaining);
  if (cap) bound = std::min(bound, *cap);
  if (!(bound > 0.0)) return std::nullopt;

  double best = -std::numeric_limits<double>::infinity();
  double arg = 0.0;
  const double limit = bound - 1e-12;
  for (std::size_t k = 1; k <= base_.size(); ++k) {
    const double eps = static_cast<double>(k) * cfg_.grid_step;
    if (!(eps < limit)) break;
    const double v = base_[k - 1] - s * risk_[k - 1];
    if (v > best) {
      best = v;
      arg = eps;
    }
  }
  if (value_at(bound, s) > best) arg = bound;
  return arg;
}

NegotiationOutcome Engine::negotiate(const ValidatedRequest& req,
                                     const BudgetLedger& ledger,
                                     double trust) const {
  return negotiate_traced(req, ledger.h_remaining(), trust).outcome;
}

NegotiationTrace Engine::negotiate_traced(const ValidatedRequest& req,
                                          double h_remaining,
                                          double trust) const {
  return negotiate_traced(req, h_remaining, trust, 1.0);
}

NegotiationTrace Engine::negotiate_traced(const ValidatedRequest& req,
                                          double h_remaining, double trust,
                                          double sensitivity_multiplier) const {
  const ContractRequest& request = req.request();
  const double scale = cfg_.sensitivity_scale * sensitivity_multiplier;
  const double s = effective_sensitivity(req) * scale;
  const auto cap = request.proposed_epsilon;
  const double h = h_remaining;

  NegotiationTrace trace{NegotiationOutcome::reject(Constraint::BudgetExceeded),
                         {s, trust, req.purpose_score(), h, std::nullopt},
                         {},
                         cfg_.eps_min(s, request.purpose),
                         std::nullopt};
  auto finish = [&](NegotiationOutcome o) {
    trace.factors.epsilon_star = o.epsilon_star();
    trace.outcome = std::move(o);
    return trace;
  };

  if (h < cfg_.safety_factor * s) {
    trace.predicates.safe = false;
    return finish(NegotiationOutcome::reject(Constraint::SafetyCondition));
  }

  Constraint last = Constraint::BudgetExceeded;
  if (auto eps = optimize(s, h, cap)) {
    auto v = check_feasibility(*eps, s, request.purpose, h, cfg_);
    if (!v) {
      trace.predicates.initial_feasible = true;
      return finish(NegotiationOutcome::approve(*eps));
    }
    last = *v;
  }

  if (auto counter = derive_counter_offer(req, catalog_, cfg_)) {
    trace.predicates.counter_derived = true;
    const auto revalidated = validate_request(counter->request, catalog_);
    const double s2 = effective_sensitivity(revalidated) * scale;
    trace.counter_s_eff = s2;
    if (auto eps = optimize(s2, h, cap)) {
      auto v = check_feasibility(*eps, s2, request.purpose, h, cfg_);
      if (!v) {
        trace.predicates.counter_feasible = true;
        return finish(
            NegotiationOutcome::counter_offer(counter->request, *eps));
      }
      last = *v;
    } else {
      last = Constraint::BudgetExceeded;
    }
  }

  const double reach = cap ? std::min(h, *cap) : h;
  if (trust >= cfg_.trusted_min_trust && s <= cfg_.trusted_max_sensitivity &&
      trace.eps_min <= reach + kBudgetTolerance) {
    trace.predicates.trusted_eligible = true;
    return finish(NegotiationOutcome::approve(trace.eps_min));
  }
  return finish(NegotiationOutcome::reject(last));
}

}  // namespace dpnego
