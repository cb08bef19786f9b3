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
#include <sstream>

#include "dpnego/error.hpp"
#include "dpnego/random.hpp"
#include "dpnego/scoring.hpp"

namespace dpnego {
namespace {

const DataCatalog kCat = DataCatalog::defaults();

TEST(Sensitivity, FeatureSums) {
  EXPECT_DOUBLE_EQ(sensitivity_score({Feature::LoadCurve}, kCat), 0.4);
  EXPECT_DOUBLE_EQ(
      sensitivity_score({Feature::Location, Feature::ApplianceLevel}, kCat),
      1.7);
  EXPECT_DOUBLE_EQ(sensitivity_score({}, kCat), 0.0);
}

TEST(Sensitivity, MonotoneUnderSuperset) {
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    FeatureSet a, b;
    for (auto f : kAllFeatures) {
      if (rng.bernoulli(0.5)) a.insert(f);
    }
    b = a;
    for (auto f : kAllFeatures) {
      if (rng.bernoulli(0.5)) b.insert(f);
    }
    EXPECT_LE(sensitivity_score(a, kCat), sensitivity_score(b, kCat));
  }
}

TrustLedger ledger(std::uint64_t n, double q, double a) {
  TrustLedger l;
  l.succ_count = n;
  l.quality = q;
  l.alignment = a;
  return l;
}

TEST(Trust, ScoreExamples) {
  const TrustConfig cfg;
  EXPECT_DOUBLE_EQ(trust_score(ledger(0, 0, 0), cfg), 0.0);
  EXPECT_DOUBLE_EQ(trust_score(ledger(10, 1, 1), cfg), 1.0);
  EXPECT_DOUBLE_EQ(trust_score(ledger(40, 1, 1), cfg), 1.0);
  // 0.4 * 5/10 + 0.3 * 0.8 + 0.3 * 0.5
  EXPECT_NEAR(trust_score(ledger(5, 0.8, 0.5), cfg), 0.59, 1e-12);
}

TEST(Trust, ScoreStaysInUnitInterval) {
  const TrustConfig cfg;
  Rng rng(11);
  for (int i = 0; i < 1000; ++i) {
    const auto t = trust_score(
        ledger(rng.below(50), rng.uniform(), rng.uniform()), cfg);
    EXPECT_GE(t, 0.0);
    EXPECT_LE(t, 1.0);
  }
}

TEST(Trust, EwmaHalfLife) {
  TrustConfig cfg;
  cfg.half_life = 1.0;
  auto l = update_trust({}, TrustEvent::quality(1.0), cfg);
  EXPECT_DOUBLE_EQ(l.quality, 0.5);
}

TEST(Trust, CompletedIncrementsAndBoundsChecked) {
  const TrustConfig cfg;
  auto l = update_trust(ledger(3, 0, 0), TrustEvent::completed(), cfg);
  EXPECT_EQ(l.succ_count, 4u);
  try {
    update_trust(l, TrustEvent::alignment(1.2), cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OutOfRange);
  }
}

TEST(Trust, ConfigValidation) {
  TrustConfig cfg;
  cfg.beta = {0.5, 0.5, 0.5};
  EXPECT_THROW(cfg.validate(), Error);
  cfg = {};
  cfg.n_sat = 0;
  EXPECT_THROW(cfg.validate(), Error);
}

TEST(Purpose, TableValues) {
  EXPECT_DOUBLE_EQ(purpose_score(Purpose::Billing, kCat), 1.0);
  EXPECT_DOUBLE_EQ(purpose_score(Purpose::Profiling, kCat), 0.1);
  EXPECT_DOUBLE_EQ(purpose_score(Purpose::GridMonitoring, kCat), 0.75);
}

TEST(TrustBook, ReplayReproducesLedgers) {
  TrustBook book;
  Rng rng(5);
  for (int i = 0; i < 300; ++i) {
    const std::string who = "r" + std::to_string(rng.below(4));
    switch (rng.below(3)) {
      case 0: book.record(who, TrustEvent::completed()); break;
      case 1: book.record(who, TrustEvent::quality(rng.uniform())); break;
      default: book.record(who, TrustEvent::alignment(rng.uniform())); break;
    }
  }
  std::stringstream ss;
  book.write_events(ss);
  const auto back = TrustBook::replay(ss, book.config());
  EXPECT_EQ(back.ledgers(), book.ledgers());
  EXPECT_DOUBLE_EQ(book.score("unknown"), 0.0);
}

}  // namespace
}  // namespace dpnego
