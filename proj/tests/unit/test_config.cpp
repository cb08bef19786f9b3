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

#include <fstream>
#include <sstream>

#include "dpnego/config.hpp"
#include "dpnego/error.hpp"
#include "dpnego/owner.hpp"

namespace dpnego {
namespace {

TEST(Config, ShippedDefaultMatchesBuiltIn) {
  EXPECT_EQ(load_config(DPNEGO_DEFAULT_CONFIG), Config::defaults());
}

TEST(Config, JsonRoundTrip) {
  const auto c = Config::defaults();
  EXPECT_EQ(config_from_json(config_to_json(c)), c);
}

TEST(Config, PartialOverrideMerges) {
  const auto c = config_from_json(Json{{"seed", 11}, {"baseline", {{"eps_fix", 0.2}}}});
  EXPECT_EQ(c.seed, 11u);
  EXPECT_DOUBLE_EQ(c.baseline.eps_fix, 0.2);
  EXPECT_EQ(c.sweep, Config::defaults().sweep);
}

TEST(Config, UnknownKeyRejected) {
  EXPECT_THROW(config_from_json(Json{{"sead", 11}}), Error);
  EXPECT_THROW(config_from_json(Json{{"engine", {{"eps_maks", 1}}}}), Error);
}

TEST(Config, InvalidValuesRejected) {
  EXPECT_THROW(config_from_json(Json{{"engine", {{"eps_max", -1.0}}}}), Error);
  EXPECT_THROW(config_from_json(Json{{"tss", {{"k", 6}, {"n", 5}}}}), Error);
}

TEST(Owner, JsonRoundTrip) {
  OwnerState s;
  s.owner_id = "h7";
  s.ledger.settle("c1", 1.25);
  s.trust.record("u", TrustEvent::completed());
  s.trust.record("u", TrustEvent::quality(0.9));
  const auto back = owner_from_json(owner_to_json(s), TrustConfig{});
  EXPECT_EQ(back.owner_id, s.owner_id);
  EXPECT_EQ(back.ledger, s.ledger);
  EXPECT_EQ(back.trust.ledgers(), s.trust.ledgers());
  EXPECT_EQ(back.audit_head, s.audit_head);
}

TEST(Owner, BareRemainingBudget) {
  const auto s = owner_from_json(
      Json{{"owner_id", "h"}, {"ledger", {{"h_max", 8.0}, {"h_remaining", 0.3}}}},
      TrustConfig{});
  EXPECT_DOUBLE_EQ(s.ledger.h_remaining(), 0.3);
  EXPECT_NEAR(s.ledger.total_granted(), 7.7, 1e-12);
}

}  // namespace
}  // namespace dpnego
