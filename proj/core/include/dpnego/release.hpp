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

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dpnego/contract.hpp"
#include "dpnego/json.hpp"
#include "dpnego/random.hpp"
#include "dpnego/tss.hpp"

namespace dpnego {

enum class Mechanism { Laplace, Gaussian, RandomizedRounding };
enum class AggregateKind { Sum, Mean, Max, Count };

std::string_view to_string(Mechanism m);
Mechanism parse_mechanism(std::string_view s);
std::string_view to_string(AggregateKind k);

inline constexpr double kGaussianDelta = 1e-5;

struct PlanOp {
  enum class Kind { Select, Window, Resample, Clip, Aggregate };
  Kind kind = Kind::Select;
  FeatureSet features;                       // Select
  int hours = 0;                             // Window
  Resolution resolution = Resolution::Hour1;  // Resample
  double lo = 0.0, hi = 0.0;                 // Clip
  AggregateKind aggregate = AggregateKind::Sum;

  static PlanOp select(FeatureSet f);
  static PlanOp window(int hours);
  static PlanOp resample(Resolution r);
  static PlanOp clip(double lo, double hi);
  static PlanOp reduce(AggregateKind k);

  bool operator==(const PlanOp&) const = default;
};

struct QueryPlan {
  std::vector<PlanOp> ops;
  double delta = 1.0;  // L1 sensitivity per output
  int output_arity = 1;
  Mechanism mechanism = Mechanism::Laplace;
  int categories = 2;  // randomized rounding only

  bool operator==(const QueryPlan&) const = default;
};

struct ReleasePolicy {
  int output_cap = 4;
  int max_steps = 32;

  bool operator==(const ReleasePolicy&) const = default;
};

// Throws RuntimeBudgetExceeded, ScopeViolation, ArityExceeded,
// NonPositiveSensitivity or InvalidArgument.
void validate_plan(const QueryPlan& plan, const ContractRequest& contract,
                   const ReleasePolicy& policy);

// Samples per feature, oldest first, at a single resolution.
struct LocalData {
  Resolution resolution = Resolution::Hour1;
  std::map<Feature, std::vector<double>> series;
};

// Restricts the data to the contracted window and resolution, then runs the
// plan. Throws DataGap when the data does not cover the window.
std::vector<double> execute_plan(const QueryPlan& plan,
                                 const ContractRequest& contract,
                                 const LocalData& data);

double laplace_scale(double delta, double eps);
double gaussian_sigma(double delta, double eps);
// Probability of reporting the true category among c.
double rr_truth_probability(double eps, int categories);

// Inverse-CDF Laplace draw with scale b.
double sample_laplace(Rng& rng, double b);
int sample_randomized_rounding(Rng& rng, int truth, int categories,
                               double eps);

struct SanitizedOutput {
  std::vector<double> values;
  Mechanism mechanism = Mechanism::Laplace;
  double epsilon_charged = 0.0;
  std::string trace_id;
  // Scale (or truth probability) applied to each coordinate.
  std::vector<double> noise_trace;

  bool operator==(const SanitizedOutput&) const = default;
};

// Consumes the token before sampling. Throws NonPositiveEpsilon,
// NonPositiveSensitivity or TokenConsumed.
SanitizedOutput dp_noise(const std::vector<double>& y, double eps_star,
                         const QueryPlan& plan, std::uint64_t seed,
                         ReleaseToken& token);

// Throws ArityExceeded or UnnoisedOutput.
void compliance_check(const SanitizedOutput& out, const ReleasePolicy& policy);

QueryPlan plan_from_json(const Json& j);
void to_json(Json& j, const QueryPlan& p);
void to_json(Json& j, const SanitizedOutput& o);

}  // namespace dpnego
