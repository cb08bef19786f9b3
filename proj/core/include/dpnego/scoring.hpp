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

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "dpnego/contract.hpp"

namespace dpnego {

struct TrustConfig {
  std::array<double, 3> beta{0.4, 0.3, 0.3};
  int n_sat = 10;
  // Number of events after which an old report carries half the weight.
  double half_life = 5.0;

  // Throws InvalidConfig unless beta is non-negative, sums to 1 and n_sat >= 1.
  void validate() const;
  // Weight given to a new quality/alignment report.
  double ewma_weight() const;

  bool operator==(const TrustConfig&) const = default;
};

enum class TrustEventKind { Completed, QualityReport, AlignmentReport };

std::string_view to_string(TrustEventKind k);
TrustEventKind parse_trust_event_kind(std::string_view s);

struct TrustEvent {
  TrustEventKind kind = TrustEventKind::Completed;
  double value = 0.0;  // report value in [0,1]; ignored for Completed

  static TrustEvent completed() { return {TrustEventKind::Completed, 0.0}; }
  static TrustEvent quality(double q) {
    return {TrustEventKind::QualityReport, q};
  }
  static TrustEvent alignment(double a) {
    return {TrustEventKind::AlignmentReport, a};
  }

  bool operator==(const TrustEvent&) const = default;
};

// Reliability history of one requester towards one owner.
struct TrustLedger {
  std::uint64_t succ_count = 0;
  double quality = 0.0;
  double alignment = 0.0;
  std::vector<TrustEvent> history;

  bool operator==(const TrustLedger&) const = default;
};

// Raw sum of feature alphas; resolution attenuation is applied elsewhere.
double sensitivity_score(const FeatureSet& features, const DataCatalog& catalog);

double trust_score(const TrustLedger& ledger, const TrustConfig& cfg);

// Throws OutOfRange when a report value lies outside [0,1].
TrustLedger update_trust(TrustLedger ledger, const TrustEvent& event,
                         const TrustConfig& cfg);

double purpose_score(Purpose p, const DataCatalog& catalog);

// Per-owner trust book keyed by requester id, persisted as JSON lines of
// {"requester", "event", "value"}.
class TrustBook {
 public:
  explicit TrustBook(TrustConfig cfg = {}) : cfg_(cfg) {}

  const TrustLedger& ledger(const std::string& requester) const;
  double score(const std::string& requester) const;
  void record(const std::string& requester, const TrustEvent& event);

  const std::map<std::string, TrustLedger>& ledgers() const { return ledgers_; }
  const TrustConfig& config() const { return cfg_; }

  // Event log in append order.
  void write_events(std::ostream& os) const;
  static TrustBook replay(std::istream& is, TrustConfig cfg);

 private:
  TrustConfig cfg_;
  std::map<std::string, TrustLedger> ledgers_;
  std::vector<std::pair<std::string, TrustEvent>> log_;
};

}  // namespace dpnego
