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

#include <cmath>

#include "dpnego/config.hpp"
#include "dpnego/error.hpp"
#include "dpnego/random.hpp"
#include "dpnego/simulation.hpp"

namespace dpnego {

ProbeResult robustness_probe(const Config& cfg,
                             const std::vector<ReplayItem>& items,
                             double perturbation, std::uint64_t seed) {
  if (!(perturbation >= 0.0 && perturbation <= 0.5)) {
    throw Error(ErrorCode::InvalidArgument, "perturbation outside [0, 0.5]");
  }
  const Engine engine(cfg.engine, cfg.catalog);
  Rng rng(seed);
  ProbeResult res;
  double drift = 0.0;
  std::size_t both_approved = 0;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto& item = items[i];
    const double ft = rng.uniform(1.0 - perturbation, 1.0 + perturbation);
    const double fs = rng.uniform(1.0 - perturbation, 1.0 + perturbation);
    const auto v = validate_request(item.request, cfg.catalog);
    const auto base = engine.negotiate_traced(v, item.h_remaining, item.trust);
    const auto pert =
        engine.negotiate_traced(v, item.h_remaining, item.trust * ft, fs);
    ++res.requests;
    const auto d0 = base.outcome.decision();
    const auto d1 = pert.outcome.decision();
    if (d0 == d1) {
      ++res.unchanged;
      if (d0 == Decision::Approve) {
        drift += std::abs(*pert.outcome.epsilon_star() -
                          *base.outcome.epsilon_star());
        ++both_approved;
      }
    } else {
      res.flips.push_back({i, d0, d1, !(base.predicates == pert.predicates)});
    }
  }
  if (res.requests > 0) {
    res.stability = static_cast<double>(res.unchanged) /
                    static_cast<double>(res.requests);
  }
  if (both_approved > 0) {
    res.mean_eps_drift = drift / static_cast<double>(both_approved);
  }
  return res;
}

}  // namespace dpnego
