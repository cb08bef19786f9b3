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

#include "dpnego/tss.hpp"

#include <openssl/crypto.h>

#include <array>
#include <set>

#include "dpnego/digest.hpp"
#include "dpnego/error.hpp"

namespace dpnego {

namespace {

using Wide = boost::multiprecision::uint512_t;

FieldElement add_mod(const FieldElement& a, const FieldElement& b) {
  FieldElement s = a + b;  // both < 2^255, no overflow
  if (s >= field_modulus()) s -= field_modulus();
  return s;
}

FieldElement sub_mod(const FieldElement& a, const FieldElement& b) {
  return a >= b ? FieldElement(a - b) : FieldElement(field_modulus() - (b - a));
}

FieldElement mul_mod(const FieldElement& a, const FieldElement& b) {
  Wide w = Wide(a) * Wide(b);
  return FieldElement(w % Wide(field_modulus()));
}

FieldElement pow_mod(FieldElement base, FieldElement exp) {
  FieldElement result = 1;
  while (exp != 0) {
    if ((exp & 1) != 0) result = mul_mod(result, base);
    base = mul_mod(base, base);
    exp >>= 1;
  }
  return result;
}

FieldElement inverse(const FieldElement& a) {
  return pow_mod(a, field_modulus() - 2);
}

std::array<unsigned char, 32> to_bytes(const FieldElement& v) {
  std::array<unsigned char, 32> out{};
  FieldElement x = v;
  for (int i = 31; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] =
        static_cast<unsigned char>(static_cast<unsigned>(x & 0xff));
    x >>= 8;
  }
  return out;
}

void wipe(FieldElement& v) {
  v = 0;
  OPENSSL_cleanse(static_cast<void*>(&v), sizeof(v));
}

}  // namespace

const FieldElement& field_modulus() {
  static const FieldElement p = (FieldElement(1) << 255) - 19;
  return p;
}

std::string to_hex(const FieldElement& v) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned char b : to_bytes(v)) {
    out.push_back(kHex[b >> 4]);
    out.push_back(kHex[b & 0xf]);
  }
  return out;
}

FieldElement field_from_hex(std::string_view hex) {
  if (hex.empty() || hex.size() > 64) {
    throw Error(ErrorCode::InvalidArgument, "field hex must be 1..64 digits");
  }
  FieldElement v = 0;
  for (char c : hex) {
    unsigned d;
    if (c >= '0' && c <= '9') d = static_cast<unsigned>(c - '0');
    else if (c >= 'a' && c <= 'f') d = static_cast<unsigned>(c - 'a' + 10);
    else if (c >= 'A' && c <= 'F') d = static_cast<unsigned>(c - 'A' + 10);
    else throw Error(ErrorCode::InvalidArgument, "bad hex digit");
    v = (v << 4) | d;
  }
  return v;
}

FieldElement random_field_element(Rng& rng) {
  for (;;) {
    FieldElement v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 64) | FieldElement(rng());
    v &= (FieldElement(1) << 255) - 1;
    if (v < field_modulus()) return v;
  }
}

std::vector<KeyShare> split(const FieldElement& secret, int k, int n,
                            std::uint64_t seed) {
  Rng rng(seed);
  return split(secret, k, n, rng);
}

std::vector<KeyShare> split(const FieldElement& secret, int k, int n,
                            Rng& rng) {
  if (k < 1 || n < 1 || k > n) {
    throw Error(ErrorCode::InvalidThreshold,
                "need 1 <= k <= n, got k=" + std::to_string(k) +
                    " n=" + std::to_string(n));
  }
  if (secret >= field_modulus()) {
    throw Error(ErrorCode::SecretOutOfField, "secret >= field modulus");
  }
  std::vector<FieldElement> coeffs{secret};
  for (int i = 1; i < k; ++i) coeffs.push_back(random_field_element(rng));

  SchemeId scheme{k, n, field_modulus(), {}};
  scheme.tag = sha256_hex(to_hex(FieldElement(rng()))).substr(0, 16);

  std::vector<KeyShare> shares;
  shares.reserve(static_cast<std::size_t>(n));
  for (int x = 1; x <= n; ++x) {
    FieldElement y = 0;  // Horner
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
      y = add_mod(mul_mod(y, FieldElement(x)), *it);
    }
    shares.push_back({x, y, scheme});
  }
  for (auto& c : coeffs) wipe(c);
  return shares;
}

FieldElement reconstruct(std::span<const KeyShare> shares) {
  if (shares.empty()) {
    throw Error(ErrorCode::InsufficientShares, "no shares given");
  }
  const SchemeId& scheme = shares.front().scheme;
  std::set<int> seen;
  for (const auto& s : shares) {
    if (!(s.scheme == scheme)) {
      throw Error(ErrorCode::MixedScheme, "shares come from different splits");
    }
    if (s.index < 1 || s.index > scheme.n) {
      throw Error(ErrorCode::InvalidArgument, "share index out of range");
    }
    if (!seen.insert(s.index).second) {
      throw Error(ErrorCode::DuplicateIndex,
                  "index " + std::to_string(s.index) + " repeated");
    }
  }
  if (shares.size() < static_cast<std::size_t>(scheme.k)) {
    throw Error(ErrorCode::InsufficientShares,
                std::to_string(shares.size()) + " shares, need " +
                    std::to_string(scheme.k));
  }

  // L_i(0) = prod_{j!=i} x_j / (x_j - x_i); all denominators are inverted
  // together with one field inversion.
  const auto k = static_cast<std::size_t>(scheme.k);
  std::vector<FieldElement> num(k, 1), den(k, 1);
  for (std::size_t i = 0; i < k; ++i) {
    const FieldElement xi(shares[i].index);
    for (std::size_t j = 0; j < k; ++j) {
      if (i == j) continue;
      const FieldElement xj(shares[j].index);
      num[i] = mul_mod(num[i], xj);
      den[i] = mul_mod(den[i], sub_mod(xj, xi));
    }
  }
  std::vector<FieldElement> prefix(k);
  FieldElement acc = 1;
  for (std::size_t i = 0; i < k; ++i) {
    prefix[i] = acc;
    acc = mul_mod(acc, den[i]);
  }
  FieldElement inv = inverse(acc);
  FieldElement secret = 0;
  for (std::size_t i = k; i-- > 0;) {
    const FieldElement inv_i = mul_mod(inv, prefix[i]);
    inv = mul_mod(inv, den[i]);
    secret = add_mod(secret, mul_mod(shares[i].value, mul_mod(num[i], inv_i)));
  }
  return secret;
}

std::string secret_digest(const FieldElement& secret) {
  auto bytes = to_bytes(secret);
  std::string digest = sha256_hex(std::string_view(
      reinterpret_cast<const char*>(bytes.data()), bytes.size()));
  OPENSSL_cleanse(bytes.data(), bytes.size());
  return digest;
}

void ReleaseToken::consume() {
  if (consumed_) {
    throw Error(ErrorCode::TokenConsumed,
                "token for " + contract_id_ + " already used");
  }
  consumed_ = true;
}

void ReleaseRegistry::register_contract(const std::string& contract_id,
                                        const SchemeId& scheme,
                                        std::string digest) {
  std::lock_guard lock(mu_);
  entries_[contract_id] = Entry{scheme, std::move(digest), false};
}

ReleaseToken ReleaseRegistry::authorize_release(
    const std::string& contract_id, std::span<const KeyShare> shares) {
  std::lock_guard lock(mu_);
  auto it = entries_.find(contract_id);
  if (it == entries_.end()) {
    throw Error(ErrorCode::UnknownContract,
                "contract " + contract_id + " is not approved");
  }
  if (it->second.authorized) {
    throw Error(ErrorCode::AlreadyAuthorized,
                "contract " + contract_id + " was already released");
  }
  for (const auto& s : shares) {
    if (!(s.scheme == it->second.scheme)) {
      throw Error(ErrorCode::MixedScheme,
                  "share does not belong to the contract's scheme");
    }
  }
  FieldElement secret = reconstruct(shares);
  std::string digest = secret_digest(secret);
  wipe(secret);
  if (digest != it->second.digest) {
    throw Error(ErrorCode::InvalidArgument,
                "shares do not reconstruct the contract secret");
  }
  it->second.authorized = true;
  return ReleaseToken(contract_id, std::move(digest));
}

bool ReleaseRegistry::is_authorized(const std::string& contract_id) const {
  std::lock_guard lock(mu_);
  auto it = entries_.find(contract_id);
  return it != entries_.end() && it->second.authorized;
}

void to_json(Json& j, const KeyShare& s) {
  j = Json{{"index", s.index},
           {"value", to_hex(s.value)},
           {"scheme",
            {{"k", s.scheme.k},
             {"n", s.scheme.n},
             {"modulus", to_hex(s.scheme.modulus)},
             {"tag", s.scheme.tag}}}};
}

KeyShare share_from_json(const Json& j) {
  try {
    KeyShare s;
    s.index = j.at("index").get<int>();
    s.value = field_from_hex(j.at("value").get<std::string>());
    const auto& sc = j.at("scheme");
    s.scheme.k = sc.at("k").get<int>();
    s.scheme.n = sc.at("n").get<int>();
    s.scheme.modulus = field_from_hex(sc.at("modulus").get<std::string>());
    s.scheme.tag = sc.at("tag").get<std::string>();
    return s;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::SchemaMismatch, e.what());
  }
}

}  // namespace dpnego
