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

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <map>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "dpnego/json.hpp"
#include "dpnego/random.hpp"

namespace dpnego {

using FieldElement = boost::multiprecision::uint256_t;

// 2^255 - 19.
const FieldElement& field_modulus();

std::string to_hex(const FieldElement& v);
// Throws InvalidArgument on malformed hex.
FieldElement field_from_hex(std::string_view hex);

// Uniform element of [0, p) by rejection sampling.
FieldElement random_field_element(Rng& rng);

struct SchemeId {
  int k = 3;
  int n = 5;
  FieldElement modulus = field_modulus();
  std::string tag;  // distinguishes independent splits with equal (k, n)

  bool operator==(const SchemeId&) const = default;
};

struct KeyShare {
  int index = 0;
  FieldElement value;
  SchemeId scheme;

  bool operator==(const KeyShare&) const = default;
};

// Throws InvalidThreshold (k == 0, k > n) or SecretOutOfField.
std::vector<KeyShare> split(const FieldElement& secret, int k, int n,
                            std::uint64_t seed);
std::vector<KeyShare> split(const FieldElement& secret, int k, int n,
                            Rng& rng);

// Lagrange interpolation at zero. Throws InsufficientShares, MixedScheme or
// DuplicateIndex.
FieldElement reconstruct(std::span<const KeyShare> shares);

std::string secret_digest(const FieldElement& secret);

// Single-use authorization for one contract's release. Move-only.
class ReleaseToken {
 public:
  ReleaseToken(ReleaseToken&&) noexcept = default;
  ReleaseToken& operator=(ReleaseToken&&) noexcept = default;
  ReleaseToken(const ReleaseToken&) = delete;
  ReleaseToken& operator=(const ReleaseToken&) = delete;

  const std::string& contract_id() const { return contract_id_; }
  const std::string& secret_digest() const { return digest_; }
  bool consumed() const { return consumed_; }
  // Marks the token used. Throws TokenConsumed on a second call.
  void consume();

 private:
  friend class ReleaseRegistry;
  ReleaseToken(std::string contract_id, std::string digest)
      : contract_id_(std::move(contract_id)), digest_(std::move(digest)) {}

  std::string contract_id_;
  std::string digest_;
  bool consumed_ = false;
};

// Tracks which contracts may be released and which already were.
class ReleaseRegistry {
 public:
  // Called once a contract is approved and settled.
  void register_contract(const std::string& contract_id,
                         const SchemeId& scheme, std::string digest);

  // Throws UnknownContract, AlreadyAuthorized, InsufficientShares,
  // MixedScheme, DuplicateIndex, or InvalidArgument when the shares
  // reconstruct a different secret. The reconstructed secret is wiped
  // before returning.
  ReleaseToken authorize_release(const std::string& contract_id,
                                 std::span<const KeyShare> shares);

  bool is_authorized(const std::string& contract_id) const;

 private:
  struct Entry {
    SchemeId scheme;
    std::string digest;
    bool authorized = false;
  };
  mutable std::mutex mu_;
  std::map<std::string, Entry> entries_;
};

void to_json(Json& j, const KeyShare& s);
KeyShare share_from_json(const Json& j);

}  // namespace dpnego
