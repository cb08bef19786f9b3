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

#include <cstdint>
#include <filesystem>
#include <vector>

#include "dpnego/contract.hpp"
#include "dpnego/engine.hpp"
#include "dpnego/explain.hpp"
#include "dpnego/ingest.hpp"
#include "dpnego/json.hpp"
#include "dpnego/release.hpp"
#include "dpnego/scoring.hpp"
#include "dpnego/simulation.hpp"

namespace dpnego {

struct TssConfig {
  int k = 3;
  int n = 5;

  bool operator==(const TssConfig&) const = default;
};

// Everything an experiment needs; loaded from one JSON document.
struct Config {
  std::uint64_t seed = 7;
  DataCatalog catalog = DataCatalog::defaults();
  TrustConfig trust;
  EngineConfig engine;
  ExplainConfig explain;
  ReleasePolicy release;
  TssConfig tss;
  std::vector<CityProfile> cities = default_city_profiles();
  SweepConfig sweep;
  FullSimConfig full_sim;
  CrossDatasetConfig cross_dataset;
  BaselineConfig baseline;
  AdversaryConfig adversary;
  BenchConfig bench;

  // Built-in defaults; identical to config/default.json.
  static Config defaults();
  // Throws InvalidConfig on any out-of-range value.
  void validate() const;

  bool operator==(const Config&) const = default;
};

Json config_to_json(const Config& c);
// Keys absent from the document keep their defaults; unknown keys are errors.
Config config_from_json(const Json& j);
Config load_config(const std::filesystem::path& path);

}  // namespace dpnego
