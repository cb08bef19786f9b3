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

#include "dpnego/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <nlohmann/json.hpp>
#include <ostream>

#include "dpnego/error.hpp"

namespace dpnego {

void TrustConfig::validate() const {
  double sum = 0.0;
  for (double b : beta) {
    if (!(b >= 0.0)) throw Error(ErrorCode::InvalidConfig, "beta must be >= 0");
    sum += b;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw Error(ErrorCode::InvalidConfig, "beta must sum to 1");
  }
  if (n_sat < 1) throw Error(ErrorCode::InvalidConfig, "n_sat must be >= 1");
  if (!(half_life > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "half_life must be > 0");
  }
}

double TrustConfig::ewma_weight() const {
  return 1.0 - std::exp2(-1.0 / half_life);
}

std::string_view to_string(TrustEventKind k) {
  switch (k) {
    case TrustEventKind::Completed: return "completed";
    case TrustEventKind::QualityReport: return "quality";
    case TrustEventKind::AlignmentReport: return "alignment";
  }
  return "?";
}

TrustEventKind parse_trust_event_kind(std::string_view s) {
  for (auto k : {TrustEventKind::Completed, TrustEventKind::QualityReport,
                 TrustEventKind::AlignmentReport}) {
    if (to_string(k) == s) return k;
  }
  throw Error(ErrorCode::InvalidArgument,
              "unknown trust event '" + std::string(s) + "'");
}

double sensitivity_score(const FeatureSet& features,
                         const DataCatalog& catalog) {
  double s = 0.0;
  for (Feature f : features) s += catalog.alpha(f);
  return s;
}

double trust_score(const TrustLedger& ledger, const TrustConfig& cfg) {
  const double n = std::min(
      static_cast<double>(ledger.succ_count) / static_cast<double>(cfg.n_sat),
      1.0);
  const double t = cfg.beta[0] * n + cfg.beta[1] * ledger.quality +
                   cfg.beta[2] * ledger.alignment;
  return std::clamp(t, 0.0, 1.0);
}

TrustLedger update_trust(TrustLedger ledger, const TrustEvent& event,
                         const TrustConfig& cfg) {
  const double w = cfg.ewma_weight();
  switch (event.kind) {
    case TrustEventKind::Completed:
      ++ledger.succ_count;
      break;
    case TrustEventKind::QualityReport:
    case TrustEventKind::AlignmentReport: {
      if (!(event.value >= 0.0 && event.value <= 1.0)) {
        throw Error(ErrorCode::OutOfRange,
                    std::string(to_string(event.kind)) + " report " +
                        std::to_string(event.value) + " outside [0,1]");
      }
      double& slot = event.kind == TrustEventKind::QualityReport
                         ? ledger.quality
                         : ledger.alignment;
      slot = std::clamp(slot + w * (event.value - slot), 0.0, 1.0);
      break;
    }
  }
  ledger.history.push_back(event);
  return ledger;
}

double purpose_score(Purpose p, const DataCatalog& catalog) {
  return catalog.purpose_score(p);
}

const TrustLedger& TrustBook::ledger(const std::string& requester) const {
  static const TrustLedger kEmpty;
  auto it = ledgers_.find(requester);
  return it == ledgers_.end() ? kEmpty : it->second;
}

double TrustBook::score(const std::string& requester) const {
  return trust_score(ledger(requester), cfg_);
}

void TrustBook::record(const std::string& requester, const TrustEvent& event) {
  auto& slot = ledgers_[requester];
  slot = update_trust(std::move(slot), event, cfg_);
  log_.emplace_back(requester, event);
}

void TrustBook::write_events(std::ostream& os) const {
  for (const auto& [requester, event] : log_) {
    nlohmann::json j = {{"requester", requester},
                        {"event", to_string(event.kind)},
                        {"value", event.value}};
    os << j.dump() << '\n';
  }
}

TrustBook TrustBook::replay(std::istream& is, TrustConfig cfg) {
  TrustBook book(cfg);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      book.record(j.at("requester").get<std::string>(),
                  {parse_trust_event_kind(j.at("event").get<std::string>()),
                   j.at("value").get<double>()});
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::ParseError, e.what(), line_no);
    }
  }
  return book;
}

}  // namespace dpnego
