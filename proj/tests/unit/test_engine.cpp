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

#include "dpnego/engine.hpp"
#include "dpnego/error.hpp"
#include "dpnego/random.hpp"
#include "dpnego/scoring.hpp"

namespace dpnego {
namespace {

const DataCatalog kCat = DataCatalog::defaults();

// Closed form of the default objective, written independently of the engine.
double reference_objective(double e, double s, double t, double p) {
  return 2.0 * std::sqrt(e) - 1.8 * s * std::pow(e, 1.7) + t + 0.8 * p -
         0.15 * e;
}

// Dense scan with ties resolved to the smaller epsilon.
double dense_argmax(double s, double upper, double step) {
  double best = -1e300, arg = 0.0;
  const auto n = static_cast<long>(std::floor(upper / step + 1e-9));
  for (long k = 1; k <= n; ++k) {
    const double e = static_cast<double>(k) * step;
    const double v = reference_objective(e, s, 0, 0);
    if (v > best) {
      best = v;
      arg = e;
    }
  }
  const double v = reference_objective(upper, s, 0, 0);
  if (v > best) arg = upper;
  return arg;
}

ValidatedRequest make(FeatureSet f, Resolution r, Purpose p = Purpose::Billing,
                      std::optional<double> cap = std::nullopt) {
  ContractRequest req;
  req.requester_id = "r";
  req.owner_id = "o";
  req.features = std::move(f);
  req.resolution = r;
  req.purpose = p;
  req.proposed_epsilon = cap;
  return validate_request(req, kCat);
}

TEST(Objective, HandArithmetic) {
  const EngineConfig cfg;
  EXPECT_NEAR(objective(1, 0, 0, 0, cfg), 1.85, 1e-12);
  EXPECT_NEAR(objective(1, 0.4, 0.8, 0.8, cfg), 2.57, 1e-12);
  EXPECT_THROW(objective(0, 0.4, 0.8, 0.8, cfg), Error);
}

TEST(Objective, GenericModeMatchesDefaults) {
  EngineConfig a, b;
  b.objective = ObjectiveMode::Generic;
  Rng rng(2);
  for (int i = 0; i < 100; ++i) {
    const double e = rng.uniform(0.01, 10), s = rng.uniform(0, 2.3);
    const double t = rng.uniform(), p = rng.uniform();
    EXPECT_NEAR(objective(e, s, t, p, a), objective(e, s, t, p, b), 1e-9);
    EXPECT_NEAR(objective(e, s, t, p, a), reference_objective(e, s, t, p),
                1e-9);
  }
}

TEST(Optimizer, ZeroSensitivityTakesRightEndpoint) {
  EngineConfig cfg;
  cfg.eps_max = 4.0;
  EXPECT_EQ(optimize_epsilon(0, 0.5, 1.0, cfg, 8.0), 4.0);
  const Engine engine(EngineConfig{}, kCat);
  for (double h : {0.37, 1.5, 8.0, 12.0}) {
    EXPECT_EQ(engine.optimize(0.0, h), std::min(10.0, h));
  }
}

TEST(Optimizer, InteriorOptimum) {
  const auto e = optimize_epsilon(0.4, 0.8, 0.8, EngineConfig{}, 8.0);
  ASSERT_TRUE(e);
  EXPECT_NEAR(*e, 0.752, 1e-9);
  EXPECT_NEAR(*e, dense_argmax(0.4, 8.0, 1e-4), 1e-3);
}

TEST(Optimizer, EmptyInterval) {
  EXPECT_FALSE(optimize_epsilon(0.4, 0.8, 0.8, EngineConfig{}, 0.0));
}

TEST(Optimizer, MatchesFinerOracle) {
  const Engine engine(EngineConfig{}, kCat);
  Rng rng(17);
  for (int i = 0; i < 300; ++i) {
    const double s = rng.uniform(0, 2.3), h = rng.uniform(0.01, 10);
    const auto e = engine.optimize(s, h);
    ASSERT_TRUE(e);
    EXPECT_NEAR(*e, dense_argmax(s, std::min(10.0, h), 1e-4), 1e-3)
        << "s=" << s << " h=" << h;
  }
}

TEST(Sensitivity, Attenuation) {
  EXPECT_DOUBLE_EQ(effective_sensitivity(make({Feature::LoadCurve},
                                              Resolution::Min5)),
                   0.4);
  EXPECT_NEAR(effective_sensitivity(make({Feature::LoadCurve}, Resolution::Daily)),
              0.12, 1e-12);
  EXPECT_NEAR(effective_sensitivity(make(
                  {Feature::Location, Feature::ApplianceLevel}, Resolution::Hour1)),
              1.02, 1e-12);
}

TEST(Feasibility, Inequalities) {
  const EngineConfig cfg;
  EXPECT_FALSE(check_feasibility(2.0, 0.1, Purpose::Billing, 8.0, cfg));
  EXPECT_EQ(check_feasibility(9.0, 0.1, Purpose::Billing, 8.0, cfg),
            Constraint::BudgetExceeded);
  EXPECT_EQ(check_feasibility(0.01, 0.1, Purpose::Billing, 8.0, cfg),
            Constraint::BelowMinimum);
}

TEST(EpsMinTable, FirstMatchWins) {
  EngineConfig cfg;
  cfg.eps_min_table = {{0.2, std::nullopt, 0.05},
                       {0.5, Purpose::Profiling, 0.7},
                       {0.5, std::nullopt, 0.3}};
  EXPECT_DOUBLE_EQ(cfg.eps_min(0.1, Purpose::Profiling), 0.05);
  EXPECT_DOUBLE_EQ(cfg.eps_min(0.3, Purpose::Profiling), 0.7);
  EXPECT_DOUBLE_EQ(cfg.eps_min(0.3, Purpose::Billing), 0.3);
  EXPECT_DOUBLE_EQ(cfg.eps_min(0.9, Purpose::Billing), cfg.default_eps_min);
}

TEST(CounterOffer, CoarsenThenAggregate) {
  const auto c = derive_counter_offer(make({Feature::LoadCurve}, Resolution::Min5),
                                      kCat, EngineConfig{});
  ASSERT_TRUE(c);
  EXPECT_EQ(c->request.features, FeatureSet{Feature::Aggregate});
  EXPECT_EQ(c->request.resolution, Resolution::Daily);
  EXPECT_NEAR(c->s_eff, 0.06, 1e-12);
}

TEST(CounterOffer, FloorOfPipeline) {
  EXPECT_FALSE(derive_counter_offer(make({Feature::Aggregate}, Resolution::Daily),
                                    kCat, EngineConfig{}));
}

TEST(CounterOffer, SensitiveBundleReachesTarget) {
  const auto c = derive_counter_offer(
      make({Feature::Location, Feature::ApplianceLevel}, Resolution::Min5), kCat,
      EngineConfig{});
  ASSERT_TRUE(c);
  EXPECT_LE(c->s_eff, 0.25 * 1.7 + 1e-12);
  EXPECT_FALSE(c->request.features.contains(Feature::Location));
}

TEST(CounterOffer, PropertyNeverExceedsTarget) {
  Rng rng(23);
  const EngineConfig cfg;
  for (int i = 0; i < 500; ++i) {
    FeatureSet f;
    for (auto x : kAllFeatures) {
      if (rng.bernoulli(0.5)) f.insert(x);
    }
    if (f.empty()) f.insert(Feature::LoadCurve);
    const auto res = kAllResolutions[rng.below(kAllResolutions.size())];
    const auto v = make(f, res);
    const auto c = derive_counter_offer(v, kCat, cfg);
    if (!c) continue;
    EXPECT_LE(c->s_eff, cfg.counter_factor * effective_sensitivity(v) + 1e-9);
    EXPECT_FALSE(c->request.features.empty());
    EXPECT_FALSE(is_finer(c->request.resolution, res));
    EXPECT_NEAR(c->s_eff,
                effective_sensitivity(validate_request(c->request, kCat)), 1e-12);
  }
}

TEST(Negotiate, BudgetClampedApproval) {
  const Engine engine(EngineConfig{}, kCat);
  const auto v = make({Feature::Aggregate}, Resolution::Hour1, Purpose::DemandResponse);
  const auto out = engine.negotiate(v, BudgetLedger(8.0), 0.9);
  ASSERT_EQ(out.decision(), Decision::Approve);

  BudgetLedger low(8.0);
  low.settle("prior", 6.5);
  const auto clamped = engine.negotiate(v, low, 0.9);
  ASSERT_EQ(clamped.decision(), Decision::Approve);
  EXPECT_DOUBLE_EQ(*clamped.epsilon_star(), 1.5);
}

TEST(Negotiate, SafetyRejectAtLowBudget) {
  const Engine engine(EngineConfig{}, kCat);
  const auto v = make({Feature::Aggregate}, Resolution::Hour1, Purpose::DemandResponse);
  const auto t = engine.negotiate_traced(v, 0.3, 0.9);
  EXPECT_EQ(t.outcome.decision(), Decision::Reject);
  EXPECT_EQ(t.outcome.violated(), Constraint::SafetyCondition);
  EXPECT_FALSE(t.predicates.safe);

  // The fine-grained flexibility bundle already trips the rule at 1.5.
  const auto flex = make({Feature::ApplianceLevel}, Resolution::Min5);
  EXPECT_EQ(engine.negotiate_traced(flex, 1.5, 0.9).outcome.violated(),
            Constraint::SafetyCondition);
}

TEST(Negotiate, ZeroSensitivityTakesWholeBudget) {
  auto cat = kCat;
  cat.alphas[Feature::Aggregate] = 0.0;
  const Engine engine(EngineConfig{}, cat);
  ContractRequest r;
  r.features = {Feature::Aggregate};
  const auto out =
      engine.negotiate(validate_request(r, cat), BudgetLedger(8.0), 0.5);
  ASSERT_EQ(out.decision(), Decision::Approve);
  EXPECT_EQ(*out.epsilon_star(), 8.0);
}

TEST(Negotiate, CounterWhenFloorBlocksOriginal) {
  EngineConfig cfg;
  cfg.eps_min_table = {{0.2, std::nullopt, 0.05}};
  cfg.default_eps_min = 1.0;
  const Engine engine(cfg, kCat);
  const auto t = engine.negotiate_traced(
      make({Feature::LoadCurve}, Resolution::Min5), 8.0, 0.2);
  ASSERT_EQ(t.outcome.decision(), Decision::CounterOffer);
  EXPECT_FALSE(t.predicates.initial_feasible);
  EXPECT_TRUE(t.predicates.counter_feasible);
  EXPECT_NEAR(*t.outcome.epsilon_star(), 3.17, 1e-9);
}

TEST(Negotiate, TrustedFallback) {
  EngineConfig cfg;
  cfg.default_eps_min = 2.5;
  const Engine engine(cfg, kCat);
  const auto v = make({Feature::Aggregate}, Resolution::Hour1);
  const auto trusted = engine.negotiate_traced(v, 8.0, 0.9);
  ASSERT_EQ(trusted.outcome.decision(), Decision::Approve);
  EXPECT_DOUBLE_EQ(*trusted.outcome.epsilon_star(), 2.5);
  EXPECT_TRUE(trusted.predicates.trusted_eligible);

  const auto stranger = engine.negotiate_traced(v, 8.0, 0.5);
  EXPECT_EQ(stranger.outcome.decision(), Decision::Reject);
  EXPECT_EQ(stranger.outcome.violated(), Constraint::BelowMinimum);
}

TEST(Negotiate, ProposedEpsilonCapsGrant) {
  const Engine engine(EngineConfig{}, kCat);
  const auto v = make({Feature::Aggregate}, Resolution::Hour1, Purpose::Billing, 0.1);
  const auto out = engine.negotiate(v, BudgetLedger(8.0), 0.5);
  ASSERT_EQ(out.decision(), Decision::Approve);
  EXPECT_DOUBLE_EQ(*out.epsilon_star(), 0.1);
}

TEST(Negotiate, ApprovalsNeverExceedBudget) {
  const Engine engine(EngineConfig{}, kCat);
  Rng rng(31);
  for (int i = 0; i < 1000; ++i) {
    FeatureSet f;
    for (auto x : kAllFeatures) {
      if (rng.bernoulli(0.4)) f.insert(x);
    }
    if (f.empty()) f.insert(Feature::Aggregate);
    const auto v = make(f, kAllResolutions[rng.below(5)],
                        kAllPurposes[rng.below(6)]);
    const double h = rng.uniform(0, 8);
    const auto t = engine.negotiate_traced(v, h, rng.uniform());
    if (t.outcome.epsilon_star()) {
      EXPECT_LE(*t.outcome.epsilon_star(), h + kBudgetTolerance);
      EXPECT_GT(*t.outcome.epsilon_star(), 0.0);
    }
    EXPECT_EQ(t.factors.epsilon_star, t.outcome.epsilon_star());
  }
}

TEST(Ledger, SettleAndGuards) {
  BudgetLedger l(8.0);
  l.settle("a", 2.0);
  EXPECT_DOUBLE_EQ(l.h_remaining(), 6.0);
  BudgetLedger small(0.05);
  try {
    small.settle("b", 0.10);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BudgetOverdraft);
  }
  EXPECT_THROW(l.settle("c", 0.0), Error);
}

TEST(Ledger, EightyGrantsExhaust) {
  BudgetLedger l(8.0);
  for (int i = 0; i < 80; ++i) l.settle("c" + std::to_string(i), 0.10);
  EXPECT_EQ(l.h_remaining(), 0.0);
  EXPECT_THROW(l.settle("c80", 0.10), Error);
}

TEST(Ledger, ConservationProperty) {
  Rng rng(41);
  BudgetLedger l(8.0);
  for (int i = 0; i < 500; ++i) {
    const double e = rng.uniform(0.001, 1.0);
    try {
      l.settle("c" + std::to_string(i), e);
    } catch (const Error& err) {
      EXPECT_EQ(err.code(), ErrorCode::BudgetOverdraft);
      EXPECT_GT(e, l.h_remaining());
    }
    EXPECT_GE(l.h_remaining(), 0.0);
    EXPECT_NEAR(l.total_granted() + l.h_remaining(), 8.0, 1e-9);
  }
}

}  // namespace
}  // namespace dpnego
