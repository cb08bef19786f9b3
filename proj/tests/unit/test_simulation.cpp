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

#include <cmath>

#include "dpnego/config.hpp"
#include "dpnego/error.hpp"
#include "dpnego/simulation.hpp"

namespace dpnego {
namespace {

const Config kCfg = Config::defaults();

TEST(Stream, DefaultProfilesValid) {
  for (const auto* s : {&kCfg.sweep.stream, &kCfg.full_sim.stream,
                        &kCfg.cross_dataset.stream}) {
    EXPECT_NO_THROW(s->validate());
    double total = 0.0;
    for (const auto& [p, w] : s->purpose_mix()) total += w;
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
  auto bad = kCfg.sweep.stream;
  bad.bundles[0].weight += 0.5;
  EXPECT_THROW(bad.validate(), Error);
}

TEST(Stream, CounterPolicyNames) {
  for (auto k : {CounterPolicyKind::AlwaysAccept, CounterPolicyKind::Probabilistic,
                 CounterPolicyKind::Calibrated}) {
    EXPECT_EQ(parse_counter_policy(to_string(k)), k);
  }
  EXPECT_THROW(parse_counter_policy("sometimes"), Error);
}

TEST(Baseline, ExhaustsAtEighty) {
  const auto m = run_baseline_fixed({});
  EXPECT_EQ(m.exhaustion_index, 80u);
  EXPECT_EQ(m.accepted, 80u);
  EXPECT_DOUBLE_EQ(*m.accept_rate, 0.04);
  EXPECT_EQ(m.ledger_violations, 0u);
}

TEST(Baseline, OversizedGrantAlwaysRejected) {
  BaselineConfig cfg;
  cfg.eps_fix = 9.0;
  const auto m = run_baseline_fixed(cfg);
  EXPECT_EQ(m.accepted, 0u);
  EXPECT_DOUBLE_EQ(*m.accept_rate, 0.0);
  EXPECT_FALSE(m.exhaustion_index.has_value());
}

TEST(Sweep, RegimesAndMonotonicity) {
  const auto rows = run_sweep(kCfg, 7);
  ASSERT_EQ(rows.size(), 10u);
  EXPECT_NEAR(*rows[0].metrics.accept_rate, 0.55, 0.08);
  EXPECT_NEAR(*rows[0].metrics.reject_rate, 0.40, 0.08);
  EXPECT_NEAR(*rows[0].metrics.counter_rate, 0.05, 0.04);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_GE(*rows[i].metrics.accept_rate, *rows[i - 1].metrics.accept_rate);
  }
  for (std::size_t i = 7; i < rows.size(); ++i) {
    EXPECT_EQ(*rows[i].metrics.accept_rate, 1.0);
    EXPECT_EQ(*rows[i].metrics.reject_rate, 0.0);
  }
  EXPECT_EQ(rows[0].regime, "scarce");
  EXPECT_EQ(rows[9].regime, "surplus");
}

TEST(Sweep, Deterministic) {
  const auto a = run_sweep(kCfg, 3);
  const auto b = run_sweep(kCfg, 3);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].metrics.decisions, b[i].metrics.decisions);
  }
}

TEST(FullSim, ZeroInteractions) {
  auto cfg = kCfg;
  cfg.full_sim.interactions = 0;
  auto eco = gen_ecosystem(1, cfg.full_sim.ecosystem);
  const auto m = run_full_sim(cfg, eco, 1, nullptr);
  EXPECT_EQ(m.interactions, 0u);
  EXPECT_FALSE(m.accept_rate.has_value());
  EXPECT_FALSE(summary_json(m)["rates_defined"].get<bool>());
}

TEST(FullSim, InvariantsHold) {
  auto cfg = kCfg;
  cfg.full_sim.interactions = 600;
  auto eco = gen_ecosystem(2, cfg.full_sim.ecosystem);
  std::vector<ReplayItem> replay;
  const auto m = run_full_sim(cfg, eco, 2, &replay);
  EXPECT_EQ(m.interactions, 600u);
  EXPECT_EQ(replay.size(), 600u);
  EXPECT_EQ(m.ledger_violations, 0u);
  EXPECT_EQ(m.explanation_mismatches, 0u);
  for (const auto& p : eco.prosumers) {
    EXPECT_GE(p.state.ledger.h_remaining(), 0.0);
    EXPECT_NEAR(p.state.ledger.total_granted() + p.state.ledger.h_remaining(),
                8.0, 1e-9);
  }
}

TEST(CrossDataset, RequiresData) {
  try {
    run_cross_dataset(kCfg, {}, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingDataset);
  }
}

TEST(CrossDataset, ZeroInteractionsFlagged) {
  std::vector<Dataset> ds = {{"a", gen_household_proxy(1, 3)},
                             {"b", gen_household_proxy(2, 3)}};
  const auto rows = run_cross_dataset(kCfg, ds, 1, 0);
  ASSERT_EQ(rows.size(), 2u * 3u * 2u);
  for (const auto& m : rows) EXPECT_FALSE(m.accept_rate.has_value());
}

TEST(Adversary, BudgetNeverOverdrawn) {
  const auto r = run_adversary_trust_inflation(kCfg, 1);
  ASSERT_FALSE(r.trust_trace.empty());
  for (std::size_t i = 1; i < r.trust_trace.size(); ++i) {
    EXPECT_GE(r.trust_trace[i], r.trust_trace[i - 1]);
  }
  for (double h : r.budget_trace) EXPECT_GE(h, 0.0);
  EXPECT_LE(r.metrics.granted_total, 8.0 + 1e-9);
  EXPECT_LT(r.final_budget, 0.05);
}

std::vector<ReplayItem> boundary_items(int n) {
  // Requests sitting exactly on the safety threshold H = 4S.
  std::vector<ReplayItem> items;
  const auto& cat = kCfg.catalog;
  for (int i = 0; i < n; ++i) {
    ContractRequest r;
    r.requester_id = "r" + std::to_string(i);
    r.owner_id = "o";
    r.features = {i % 2 ? Feature::LoadCurve : Feature::ApplianceLevel};
    r.resolution = Resolution::Min5;
    r.purpose = Purpose::GridMonitoring;
    const double s = effective_sensitivity(validate_request(r, cat));
    items.push_back({r, kCfg.engine.safety_factor * s, 0.5, Decision::Approve});
  }
  return items;
}

TEST(Probe, IdentityPerturbationIsStable) {
  const auto r = robustness_probe(kCfg, boundary_items(50), 0.0, 1);
  EXPECT_EQ(r.stability, 1.0);
  EXPECT_TRUE(r.flips.empty());
}

TEST(Probe, BoundaryRequestsFlipOnThresholdCrossings) {
  const auto r = robustness_probe(kCfg, boundary_items(200), 0.5, 1);
  EXPECT_LT(r.stability, 1.0);
  ASSERT_FALSE(r.flips.empty());
  for (const auto& f : r.flips) EXPECT_TRUE(f.threshold_crossed);
}

TEST(Probe, RejectsOversizedPerturbation) {
  EXPECT_THROW(robustness_probe(kCfg, {}, 0.6, 1), Error);
  EXPECT_THROW(robustness_probe(kCfg, {}, -0.1, 1), Error);
}

}  // namespace
}  // namespace dpnego
