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
#include <functional>

#include "common/golden.hpp"
#include "dpnego/error.hpp"
#include "dpnego/random.hpp"
#include "dpnego/release.hpp"
#include "dpnego/tss.hpp"

namespace dpnego {
namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::Io;
}

ContractRequest contract() {
  ContractRequest c;
  c.requester_id = "r";
  c.owner_id = "o";
  c.features = {Feature::LoadCurve};
  c.resolution = Resolution::Hour1;
  c.window_hours = 24;
  return c;
}

QueryPlan mean_plan() {
  QueryPlan p;
  p.ops = {PlanOp::select({Feature::LoadCurve}), PlanOp::window(24),
           PlanOp::reduce(AggregateKind::Mean)};
  return p;
}

LocalData constant_data(double c, std::size_t n, Resolution r) {
  LocalData d;
  d.resolution = r;
  d.series[Feature::LoadCurve] = std::vector<double>(n, c);
  return d;
}

ReleaseToken make_token(const std::string& id) {
  static ReleaseRegistry reg;
  const FieldElement secret(99);
  const auto shares = split(secret, 2, 3, 1);
  reg.register_contract(id, shares[0].scheme, secret_digest(secret));
  return reg.authorize_release(id, shares);
}

TEST(Plan, Validation) {
  const ReleasePolicy policy;
  EXPECT_NO_THROW(validate_plan(mean_plan(), contract(), policy));

  auto p = mean_plan();
  p.ops[0] = PlanOp::select({Feature::Location});
  EXPECT_EQ(code_of([&] { validate_plan(p, contract(), policy); }),
            ErrorCode::ScopeViolation);

  p = mean_plan();
  p.ops.assign(33, PlanOp::clip(0, 1));
  EXPECT_EQ(code_of([&] { validate_plan(p, contract(), policy); }),
            ErrorCode::RuntimeBudgetExceeded);

  p = mean_plan();
  p.output_arity = 10;
  EXPECT_EQ(code_of([&] { validate_plan(p, contract(), policy); }),
            ErrorCode::ArityExceeded);

  p = mean_plan();
  p.delta = 0.0;
  EXPECT_EQ(code_of([&] { validate_plan(p, contract(), policy); }),
            ErrorCode::NonPositiveSensitivity);
}

TEST(Plan, UnknownOpRejected) {
  const Json j = {{"ops", {{{"op", "export_raw"}}}}};
  EXPECT_EQ(code_of([&] { plan_from_json(j); }), ErrorCode::NonWhitelistedOp);
}

TEST(Plan, JsonRoundTrip) {
  auto p = mean_plan();
  p.ops.push_back(PlanOp::clip(0, 2));
  p.ops.insert(p.ops.begin() + 2, PlanOp::resample(Resolution::Daily));
  Json j = p;
  EXPECT_EQ(plan_from_json(j), p);
}

TEST(Execute, SumOfConstant) {
  auto p = mean_plan();
  p.ops[2] = PlanOp::reduce(AggregateKind::Sum);
  const auto out = execute_plan(p, contract(), constant_data(0.5, 48, Resolution::Hour1));
  ASSERT_EQ(out.size(), 1u);
  EXPECT_DOUBLE_EQ(out[0], 0.5 * 24);
}

TEST(Execute, ClipBoundsContribution) {
  auto d = constant_data(0.5, 24, Resolution::Hour1);
  d.series[Feature::LoadCurve][3] = 2.0;
  QueryPlan p;
  p.ops = {PlanOp::clip(0, 1), PlanOp::reduce(AggregateKind::Mean)};
  const auto out = execute_plan(p, contract(), d);
  EXPECT_DOUBLE_EQ(out[0], (23 * 0.5 + 1.0) / 24);
}

TEST(Execute, FinerDataResampledToContract) {
  // 15-minute samples, hourly contract: four samples collapse into one.
  const auto out = execute_plan(mean_plan(), contract(),
                                constant_data(0.25, 96, Resolution::Min15));
  EXPECT_DOUBLE_EQ(out[0], 0.25);
}

TEST(Execute, WindowBeyondData) {
  EXPECT_EQ(code_of([] {
              execute_plan(mean_plan(), contract(),
                           constant_data(1.0, 10, Resolution::Hour1));
            }),
            ErrorCode::DataGap);
}

TEST(Noise, Calibration) {
  EXPECT_DOUBLE_EQ(laplace_scale(1, 1), 1.0);
  EXPECT_DOUBLE_EQ(laplace_scale(2, 0.5), 4.0);
  EXPECT_GT(gaussian_sigma(1, 1), laplace_scale(1, 1));
  EXPECT_NEAR(rr_truth_probability(1, 4), std::exp(1) / (std::exp(1) + 3), 1e-15);
  EXPECT_NEAR(rr_truth_probability(50, 2), 1.0, 1e-15);
  EXPECT_THROW(laplace_scale(1, 0), Error);
}

TEST(Noise, SeededLaplaceDrawIsPinned) {
  Rng rng(2024);
  const Json actual = {{"seed", 2024}, {"b", 1.0}, {"draw", sample_laplace(rng, 1.0)}};
  const auto diag = testing::check_golden("laplace_draw", actual);
  EXPECT_TRUE(diag.empty()) << diag;
}

TEST(Noise, RandomizedRoundingStaysInRange) {
  Rng rng(6);
  for (int i = 0; i < 10000; ++i) {
    const int r = sample_randomized_rounding(rng, 2, 4, 0.5);
    EXPECT_GE(r, 0);
    EXPECT_LT(r, 4);
  }
}

TEST(DpNoise, ConsumesTokenOnce) {
  auto token = make_token("rel-1");
  const auto out = dp_noise({1.0}, 1.0, mean_plan(), 5, token);
  EXPECT_TRUE(token.consumed());
  EXPECT_EQ(out.values.size(), 1u);
  EXPECT_EQ(out.noise_trace, std::vector<double>{1.0});
  EXPECT_NO_THROW(compliance_check(out, ReleasePolicy{}));
  EXPECT_EQ(code_of([&] { dp_noise({1.0}, 1.0, mean_plan(), 5, token); }),
            ErrorCode::TokenConsumed);
}

TEST(DpNoise, InvalidEpsilonLeavesTokenUnused) {
  auto token = make_token("rel-2");
  EXPECT_EQ(code_of([&] { dp_noise({1.0}, 0.0, mean_plan(), 5, token); }),
            ErrorCode::NonPositiveEpsilon);
  EXPECT_FALSE(token.consumed());
}

TEST(DpNoise, DeterministicUnderSeed) {
  auto a = make_token("rel-3");
  auto b = make_token("rel-4");
  auto p = mean_plan();
  p.output_arity = 3;
  const auto x = dp_noise({1, 2, 3}, 0.7, p, 11, a);
  const auto y = dp_noise({1, 2, 3}, 0.7, p, 11, b);
  EXPECT_EQ(x.values, y.values);
}

TEST(Compliance, Guards) {
  SanitizedOutput out;
  out.values = {1.0};
  EXPECT_EQ(code_of([&] { compliance_check(out, ReleasePolicy{}); }),
            ErrorCode::UnnoisedOutput);
  out.values.assign(10, 0.0);
  out.noise_trace.assign(10, 1.0);
  EXPECT_EQ(code_of([&] { compliance_check(out, ReleasePolicy{}); }),
            ErrorCode::ArityExceeded);
}

}  // namespace
}  // namespace dpnego
