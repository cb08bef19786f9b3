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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "dpnego/error.hpp"
#include "dpnego/explain.hpp"
#include "dpnego/json.hpp"
#include "dpnego/random.hpp"

namespace dpnego {
namespace {

const DataCatalog kCat = DataCatalog::defaults();

ContractRequest request(FeatureSet f, Resolution r) {
  ContractRequest req;
  req.requester_id = "r";
  req.owner_id = "o";
  req.features = std::move(f);
  req.resolution = r;
  req.purpose = Purpose::DemandResponse;
  return req;
}

TEST(PuScore, PinnedValue) {
  const EngineConfig eng;
  const ExplainConfig cfg;
  // (1 - (0.4/2.3)*0.1^1.7) / 4 + sqrt(0.1) / 4 + 0.8 / 4 - 0.1 / 4
  const double risk = 0.4 / 2.3 * std::pow(0.1, 1.7);
  const double expected =
      0.25 * (1 - risk) + 0.25 * std::sqrt(0.1) + 0.25 * 0.8 - 0.25 * 0.1;
  EXPECT_NEAR(privacy_utility_score(1.0, 0.4, 0.8, eng, cfg), expected, 1e-15);
  EXPECT_NEAR(privacy_utility_score(1.0, 0.4, 0.8, eng, cfg),
              0.5031894361498751, 1e-15);
  EXPECT_THROW(privacy_utility_score(0.0, 0.4, 0.8, eng, cfg), Error);
}

TEST(PuScore, ZeroSensitivityFullTrustMaximal) {
  const EngineConfig eng;
  const ExplainConfig cfg;
  double best = -1.0;
  for (int k = 1; k <= 10000; ++k) {
    best = std::max(best, privacy_utility_score(k * 1e-3, 0.0, 1.0, eng, cfg));
  }
  Rng rng(4);
  for (int i = 0; i < 500; ++i) {
    const double e = rng.uniform(0.01, 10);
    const double u = privacy_utility_score(e, rng.uniform(0, 2.3), rng.uniform(),
                                           eng, cfg);
    EXPECT_LE(u, privacy_utility_score(e, 0.0, 1.0, eng, cfg) + 1e-15);
    EXPECT_LE(u, best + 1e-6);
  }
}

TEST(Explain, HighConsumptionWarning) {
  const Engine engine(EngineConfig{}, kCat);
  const auto req = request({Feature::Aggregate}, Resolution::Hour1);
  const auto t = engine.negotiate_traced(validate_request(req, kCat), 1.5, 0.9);
  ASSERT_EQ(t.outcome.decision(), Decision::Approve);
  ASSERT_DOUBLE_EQ(*t.outcome.epsilon_star(), 1.5);
  const auto ex = explain(req, t.outcome, t.factors, EngineConfig{}, {});
  EXPECT_TRUE(ex.warning_high_consumption);
  EXPECT_TRUE(ex.pu_score.has_value());
  EXPECT_NE(ex.text.find("Warning"), std::string::npos);
}

TEST(Explain, RejectSuggestions) {
  const Engine engine(EngineConfig{}, kCat);
  const auto req = request({Feature::Aggregate}, Resolution::Hour1);
  const auto t = engine.negotiate_traced(validate_request(req, kCat), 0.3, 0.9);
  const auto ex = explain(req, t.outcome, t.factors, EngineConfig{}, {});
  EXPECT_EQ(ex.violated, Constraint::SafetyCondition);
  EXPECT_EQ(ex.suggestions,
            (std::vector<std::string>{"reduce_resolution", "shorten_duration",
                                      "reduce_feature_sensitivity"}));
}

TEST(Explain, CounterSuggestionsNameChangedParameters) {
  EngineConfig cfg;
  cfg.eps_min_table = {{0.2, std::nullopt, 0.05}};
  cfg.default_eps_min = 1.0;
  const Engine engine(cfg, kCat);
  const auto req = request({Feature::LoadCurve}, Resolution::Min5);
  const auto t = engine.negotiate_traced(validate_request(req, kCat), 8.0, 0.2);
  ASSERT_EQ(t.outcome.decision(), Decision::CounterOffer);
  const auto ex = explain(req, t.outcome, t.factors, cfg, {});
  auto s = ex.suggestions;
  std::sort(s.begin(), s.end());
  EXPECT_EQ(s, (std::vector<std::string>{"features", "resolution"}));
}

TEST(Explain, FactorMismatchRejected) {
  NegotiationFactors f;
  f.epsilon_star = 0.5;
  try {
    explain(request({Feature::Aggregate}, Resolution::Daily),
            NegotiationOutcome::approve(0.6), f, EngineConfig{}, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::FactorMismatch);
  }
}

TEST(Explain, ConsistentWithDecisionsAndDeterministic) {
  const Engine engine(EngineConfig{}, kCat);
  Rng rng(8);
  for (int i = 0; i < 500; ++i) {
    FeatureSet f;
    for (auto x : kAllFeatures) {
      if (rng.bernoulli(0.4)) f.insert(x);
    }
    if (f.empty()) f.insert(Feature::LoadCurve);
    auto req = request(f, kAllResolutions[rng.below(5)]);
    const auto t = engine.negotiate_traced(validate_request(req, kCat),
                                           rng.uniform(0, 8), rng.uniform());
    const auto a = explain(req, t.outcome, t.factors, EngineConfig{}, {});
    const auto b = explain(req, t.outcome, t.factors, EngineConfig{}, {});
    EXPECT_EQ(a, b);
    EXPECT_EQ(a.decision, t.outcome.decision());
    EXPECT_FALSE(a.text.empty());
    EXPECT_EQ(a.trace_id.size(), 16u);
    Json j = a;
    EXPECT_EQ(explanation_from_json(j), a);
  }
}

}  // namespace
}  // namespace dpnego
