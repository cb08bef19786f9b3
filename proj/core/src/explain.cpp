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

#include "dpnego/explain.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

#include "dpnego/digest.hpp"
#include "dpnego/error.hpp"

namespace dpnego {

void ExplainConfig::validate() const {
  for (double l : lambdas) {
    if (!(l >= 0.0)) throw Error(ErrorCode::InvalidConfig, "lambda < 0");
  }
  if (!(warning_ratio > 0.0 && warning_ratio <= 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "warning_ratio outside (0,1]");
  }
  if (!(reference_sensitivity > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "reference_sensitivity must be > 0");
  }
}

double privacy_utility_score(double eps_star, double s, double t,
                             const EngineConfig& engine,
                             const ExplainConfig& cfg) {
  if (!(eps_star > 0.0)) {
    throw Error(ErrorCode::NonPositiveEpsilon, "U_PU needs eps > 0");
  }
  const double e = std::min(eps_star, engine.eps_max);
  const double top = engine.eps_max;
  const auto& c = engine.components;
  double u, r, k;
  if (engine.objective == ObjectiveMode::Experimental) {
    u = std::sqrt(e / top);
    r = std::pow(e / top, 1.7);
    k = e / top;
  } else {
    u = c.utility(e) / c.utility(top);
    r = c.risk(e) / c.risk(top);
    k = c.cost(e) / c.cost(top);
  }
  const double risk =
      std::clamp(s / cfg.reference_sensitivity * r, 0.0, 1.0);
  const auto& l = cfg.lambdas;
  return l[0] * (1.0 - risk) + l[1] * std::clamp(u, 0.0, 1.0) + l[2] * t -
         l[3] * std::clamp(k, 0.0, 1.0);
}

namespace {

std::string feature_list(const FeatureSet& fs) {
  std::string out = "[";
  for (Feature f : fs) {
    if (out.size() > 1) out += ",";
    out += to_string(f);
  }
  return out + "]";
}

std::string opt_number(const std::optional<double>& v) {
  return v ? fmt::format("{}", *v) : "none";
}

std::string reject_text(Constraint c, const NegotiationFactors& f,
                        const EngineConfig& engine) {
  std::string why;
  switch (c) {
    case Constraint::SafetyCondition:
      why = fmt::format(
          "remaining budget {:.2f} is below {:g} x sensitivity {:.3f}",
          f.h_remaining, engine.safety_factor, f.s_eff);
      break;
    case Constraint::BelowMinimum:
      why = "the best admissible epsilon falls below the required minimum";
      break;
    case Constraint::BudgetExceeded:
      why = fmt::format("no epsilon fits the remaining budget {:.2f}",
                        f.h_remaining);
      break;
  }
  return fmt::format(
      "Rejected ({}): {}. Consider reducing resolution, shortening the "
      "duration, or requesting less sensitive features.",
      to_string(c), why);
}

}  // namespace

std::vector<ParameterChange> diff_requests(const ContractRequest& before,
                                           const ContractRequest& after) {
  std::vector<ParameterChange> out;
  if (before.features != after.features) {
    out.push_back({"features", feature_list(before.features),
                   feature_list(after.features)});
  }
  if (before.window_hours != after.window_hours) {
    out.push_back({"window_hours", std::to_string(before.window_hours),
                   std::to_string(after.window_hours)});
  }
  if (before.resolution != after.resolution) {
    out.push_back({"resolution", std::string(to_string(before.resolution)),
                   std::string(to_string(after.resolution))});
  }
  if (before.purpose != after.purpose) {
    out.push_back({"purpose", std::string(to_string(before.purpose)),
                   std::string(to_string(after.purpose))});
  }
  if (before.proposed_epsilon != after.proposed_epsilon) {
    out.push_back({"proposed_epsilon", opt_number(before.proposed_epsilon),
                   opt_number(after.proposed_epsilon)});
  }
  if (before.max_noise != after.max_noise) {
    out.push_back({"max_noise", opt_number(before.max_noise),
                   opt_number(after.max_noise)});
  }
  if (before.mode != after.mode) {
    out.push_back({"mode", std::string(to_string(before.mode)),
                   std::string(to_string(after.mode))});
  }
  return out;
}

Explanation explain(const ContractRequest& original,
                    const NegotiationOutcome& outcome,
                    const NegotiationFactors& factors,
                    const EngineConfig& engine, const ExplainConfig& cfg) {
  if (outcome.epsilon_star() != factors.epsilon_star) {
    throw Error(ErrorCode::FactorMismatch,
                "outcome epsilon " + opt_number(outcome.epsilon_star()) +
                    " differs from factor epsilon " +
                    opt_number(factors.epsilon_star));
  }

  Explanation e;
  e.decision = outcome.decision();
  e.factors = factors;
  switch (outcome.decision()) {
    case Decision::Approve: {
      const double eps = *outcome.epsilon_star();
      e.pu_score =
          privacy_utility_score(eps, factors.s_eff, factors.trust, engine, cfg);
      e.warning_high_consumption =
          factors.h_remaining > 0.0 &&
          eps / factors.h_remaining >= cfg.warning_ratio;
      e.text = fmt::format(
          "Approved with epsilon* = {:.3f} (sensitivity {:.3f}, trust {:.3f}, "
          "purpose compatibility {:.2f}, remaining budget {:.3f}); "
          "privacy-utility score {:.3f}.",
          eps, factors.s_eff, factors.trust, factors.purpose,
          factors.h_remaining, *e.pu_score);
      if (e.warning_high_consumption) {
        e.text += fmt::format(
            " Warning: this grant uses {:.0f}% of the remaining privacy "
            "budget.",
            100.0 * eps / factors.h_remaining);
      }
      break;
    }
    case Decision::CounterOffer: {
      e.changes = diff_requests(original, *outcome.modified_request());
      for (const auto& c : e.changes) e.suggestions.push_back(c.parameter);
      std::string edits;
      for (const auto& c : e.changes) {
        if (!edits.empty()) edits += "; ";
        edits += fmt::format("{} {} -> {}", c.parameter, c.from, c.to);
      }
      e.text = fmt::format(
          "Counter-offer with epsilon* = {:.3f}: {}. The original request "
          "(sensitivity {:.3f}) could not be granted as proposed.",
          *outcome.epsilon_star(), edits, factors.s_eff);
      break;
    }
    case Decision::Reject:
      e.violated = outcome.violated();
      e.suggestions = reject_suggestions();
      e.text = reject_text(*outcome.violated(), factors, engine);
      break;
  }

  Json seed = {{"outcome", outcome}, {"factors", factors}};
  e.trace_id = sha256_hex(seed.dump()).substr(0, 16);
  return e;
}

void to_json(Json& j, const ParameterChange& c) {
  j = Json{{"parameter", c.parameter}, {"from", c.from}, {"to", c.to}};
}

void to_json(Json& j, const Explanation& e) {
  j = Json{{"decision", to_string(e.decision)},
           {"factors", e.factors},
           {"pu_score", nullptr},
           {"violated", nullptr},
           {"suggestions", e.suggestions},
           {"changes", e.changes},
           {"warning_high_consumption", e.warning_high_consumption},
           {"text", e.text},
           {"trace_id", e.trace_id}};
  if (e.pu_score) j["pu_score"] = *e.pu_score;
  if (e.violated) j["violated"] = to_string(*e.violated);
}

Explanation explanation_from_json(const Json& j) {
  try {
    Explanation e;
    e.decision = parse_decision(j.at("decision").get<std::string>());
    e.factors = factors_from_json(j.at("factors"));
    if (!j.at("pu_score").is_null()) e.pu_score = j.at("pu_score").get<double>();
    if (!j.at("violated").is_null()) {
      e.violated = parse_constraint(j.at("violated").get<std::string>());
    }
    e.suggestions = j.at("suggestions").get<std::vector<std::string>>();
    for (const auto& c : j.at("changes")) {
      e.changes.push_back({c.at("parameter").get<std::string>(),
                           c.at("from").get<std::string>(),
                           c.at("to").get<std::string>()});
    }
    e.warning_high_consumption = j.at("warning_high_consumption").get<bool>();
    e.text = j.at("text").get<std::string>();
    e.trace_id = j.at("trace_id").get<std::string>();
    return e;
  } catch (const Json::exception& ex) {
    throw Error(ErrorCode::SchemaMismatch, ex.what());
  }
}

}  // namespace dpnego
