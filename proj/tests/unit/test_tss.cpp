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
#include <atomic>
#include <functional>
#include <thread>

#include "dpnego/error.hpp"
#include "dpnego/random.hpp"
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

TEST(Tss, SingleShareIsSecret) {
  const auto shares = split(FieldElement(1234), 1, 1, 9);
  ASSERT_EQ(shares.size(), 1u);
  EXPECT_EQ(shares[0].value, FieldElement(1234));
}

TEST(Tss, AnyThreeOfFive) {
  const auto shares = split(FieldElement(42), 3, 5, 1);
  ASSERT_EQ(shares.size(), 5u);
  for (int a = 0; a < 5; ++a) {
    for (int b = a + 1; b < 5; ++b) {
      for (int c = b + 1; c < 5; ++c) {
        const std::vector<KeyShare> pick = {shares[a], shares[b], shares[c]};
        EXPECT_EQ(reconstruct(pick), FieldElement(42));
      }
    }
  }
}

TEST(Tss, Guards) {
  EXPECT_EQ(code_of([] { split(FieldElement(1), 6, 5, 1); }),
            ErrorCode::InvalidThreshold);
  EXPECT_EQ(code_of([] { split(FieldElement(1), 0, 5, 1); }),
            ErrorCode::InvalidThreshold);
  EXPECT_EQ(code_of([] { split(field_modulus(), 2, 3, 1); }),
            ErrorCode::SecretOutOfField);

  const auto s = split(FieldElement(42), 3, 5, 1);
  EXPECT_EQ(code_of([&] {
              const std::vector<KeyShare> two = {s[0], s[1]};
              reconstruct(two);
            }),
            ErrorCode::InsufficientShares);
  EXPECT_EQ(code_of([&] {
              const std::vector<KeyShare> dup = {s[0], s[0], s[1]};
              reconstruct(dup);
            }),
            ErrorCode::DuplicateIndex);

  const auto other = split(FieldElement(42), 3, 5, 2);
  EXPECT_NE(other[0].scheme.tag, s[0].scheme.tag);
  EXPECT_EQ(code_of([&] {
              const std::vector<KeyShare> mixed = {s[0], other[1], s[2]};
              reconstruct(mixed);
            }),
            ErrorCode::MixedScheme);
}

TEST(Tss, HexRoundTrip) {
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    const auto v = random_field_element(rng);
    EXPECT_LT(v, field_modulus());
    EXPECT_EQ(field_from_hex(to_hex(v)), v);
  }
  const auto shares = split(FieldElement(77), 2, 3, 4);
  for (const auto& s : shares) {
    Json j = s;
    EXPECT_EQ(share_from_json(j), s);
  }
}

TEST(Tss, RandomSchemesAllSubsets) {
  Rng rng(99);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(6));
    const int k = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    const auto secret = random_field_element(rng);
    const auto shares = split(secret, k, n, rng);
    std::vector<bool> mask(static_cast<std::size_t>(n), false);
    std::fill(mask.begin(), mask.begin() + k, true);
    do {
      std::vector<KeyShare> pick;
      for (int i = 0; i < n; ++i) {
        if (mask[static_cast<std::size_t>(i)]) pick.push_back(shares[static_cast<std::size_t>(i)]);
      }
      ASSERT_EQ(reconstruct(pick), secret);
    } while (std::prev_permutation(mask.begin(), mask.end()));
  }
}

TEST(Registry, SingleUseAuthorization) {
  const FieldElement secret(123456789);
  const auto shares = split(secret, 3, 5, 5);
  ReleaseRegistry reg;
  reg.register_contract("c1", shares[0].scheme, secret_digest(secret));
  const std::vector<KeyShare> three = {shares[0], shares[2], shares[4]};

  auto token = reg.authorize_release("c1", three);
  EXPECT_EQ(token.contract_id(), "c1");
  EXPECT_TRUE(reg.is_authorized("c1"));
  EXPECT_EQ(code_of([&] { reg.authorize_release("c1", three); }),
            ErrorCode::AlreadyAuthorized);

  token.consume();
  EXPECT_EQ(code_of([&] { token.consume(); }), ErrorCode::TokenConsumed);

  reg.register_contract("c2", shares[0].scheme, secret_digest(secret));
  EXPECT_EQ(code_of([&] {
              const std::vector<KeyShare> two = {shares[0], shares[1]};
              reg.authorize_release("c2", two);
            }),
            ErrorCode::InsufficientShares);
  EXPECT_FALSE(reg.is_authorized("c2"));
  EXPECT_EQ(code_of([&] { reg.authorize_release("nope", three); }),
            ErrorCode::UnknownContract);
}

TEST(Registry, ConcurrentDoubleAuthorizationHasOneWinner) {
  const FieldElement secret(31337);
  const auto shares = split(secret, 2, 3, 6);
  for (int round = 0; round < 20; ++round) {
    ReleaseRegistry reg;
    reg.register_contract("c", shares[0].scheme, secret_digest(secret));
    std::atomic<int> wins{0}, refusals{0};
    std::vector<std::thread> threads;
    for (int t = 0; t < 4; ++t) {
      threads.emplace_back([&] {
        try {
          reg.authorize_release("c", shares);
          ++wins;
        } catch (const Error& e) {
          if (e.code() == ErrorCode::AlreadyAuthorized) ++refusals;
        }
      });
    }
    for (auto& t : threads) t.join();
    EXPECT_EQ(wins.load(), 1);
    EXPECT_EQ(refusals.load(), 3);
  }
}

TEST(Registry, WrongSecretRefused) {
  const auto shares = split(FieldElement(1), 2, 3, 7);
  ReleaseRegistry reg;
  reg.register_contract("c", shares[0].scheme, secret_digest(FieldElement(2)));
  EXPECT_EQ(code_of([&] { reg.authorize_release("c", shares); }),
            ErrorCode::InvalidArgument);
  EXPECT_FALSE(reg.is_authorized("c"));
}

}  // namespace
}  // namespace dpnego
