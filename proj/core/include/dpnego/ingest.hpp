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
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dpnego/contract.hpp"
#include "dpnego/owner.hpp"

namespace dpnego {

// Seconds since the Unix epoch, UTC.
using Timestamp = std::int64_t;

// "YYYY-MM-DDTHH:MM:SSZ" (a trailing Z or +00:00 is optional on input).
Timestamp parse_timestamp(std::string_view text);
std::string format_timestamp(Timestamp t);

struct LoadSeries {
  std::string source_id;
  std::vector<Timestamp> timestamps;  // strictly increasing
  std::vector<double> values_kw;      // non-negative
  std::optional<Resolution> resolution;
  // Positions i where the gap to timestamps[i-1] exceeds the nominal step.
  std::vector<std::size_t> gaps;

  std::size_t size() const { return values_kw.size(); }
  bool operator==(const LoadSeries&) const = default;
};

enum class CsvSchema { Household, National };

std::string_view to_string(CsvSchema s);
CsvSchema parse_csv_schema(std::string_view s);

// household: timestamp,active_power_kw   national: timestamp,load_mw (stored
// as kW). Errors: ParseError(line), SchemaMismatch, NonMonotoneTimestamps.
LoadSeries parse_csv(std::istream& in, CsvSchema schema, std::string source_id);
LoadSeries load_csv(const std::filesystem::path& path, CsvSchema schema);
void write_csv(std::ostream& out, const LoadSeries& series, CsvSchema schema);
void write_csv(const std::filesystem::path& path, const LoadSeries& series,
               CsvSchema schema);

// Fills timestamps-derived fields (resolution tag, gaps).
void annotate_spacing(LoadSeries& series);

struct SeriesStats {
  double mean = 0.0;
  double stddev = 0.0;
  // Standard deviation of relative step-to-step change.
  double volatility = 0.0;
};
SeriesStats series_stats(const LoadSeries& s);

// Rescales so the mean equals target_mean_kw (national -> household size).
LoadSeries scale_to_household(LoadSeries s, double target_mean_kw = 1.0);

struct EcosystemParams {
  int prosumers = 100;
  int days = 60;
  double initial_budget = 8.0;
  Timestamp start = 1704067200;  // 2024-01-01T00:00:00Z
  // Shared outdoor temperature (degC): mean - amplitude*cos(2pi(day-phase)/365)
  double temp_mean = 9.5;
  double temp_amplitude = 9.5;
  double temp_phase_day = 15.0;
  double temp_noise_sd = 2.5;
  double comfort_temp = 18.0;
  // Per-prosumer draws: U[lo, hi]
  double base_lo = 0.2, base_hi = 0.6;
  double diurnal_lo = 0.2, diurnal_hi = 0.6;
  double heating_lo = 0.02, heating_hi = 0.06;  // kW per degC below comfort
  double spike_rate_lo = 0.03, spike_rate_hi = 0.12;  // per hour
  double spike_mean_kw = 1.5;                         // exponential size
  double noise_sd = 0.05;

  bool operator==(const EcosystemParams&) const = default;
};

struct Prosumer {
  OwnerState state;
  LoadSeries series;
  DataCatalog catalog;
};

struct Ecosystem {
  std::vector<Prosumer> prosumers;
};

Ecosystem gen_ecosystem(std::uint64_t seed, const EcosystemParams& p = {});

struct CityProfile {
  std::string name;
  double base_kw = 0.5;
  double temp_mean = 10.0;
  double temp_amplitude = 9.0;
  double temp_phase_day = 15.0;
  double heating_kw_per_deg = 0.04;
  double cooling_kw_per_deg = 0.02;
  double diurnal_amp = 0.35;
  double noise_sd = 0.06;

  bool operator==(const CityProfile&) const = default;
};

const std::vector<CityProfile>& default_city_profiles();
// Throws InvalidArgument for an unknown name.
const CityProfile& find_city(const std::vector<CityProfile>& profiles,
                             std::string_view name);

LoadSeries gen_city_series(const CityProfile& profile, std::uint64_t seed,
                           int days = 60, Timestamp start = 1704067200);

// National-scale proxy (MW magnitude) and a household proxy, used when the
// real exports are not available locally.
LoadSeries gen_national_proxy(std::string_view country, std::uint64_t seed,
                              int days = 60, Timestamp start = 1704067200);
LoadSeries gen_household_proxy(std::uint64_t seed, int days = 60,
                               Timestamp start = 1704067200);

// Eight benchmark sources: the household export, three national exports
// (scaled to household magnitude) and four city series.
struct Dataset {
  std::string name;
  LoadSeries series;
};

inline constexpr std::array<std::string_view, 4> kCsvDatasets = {
    "uci_household", "national_de", "national_fr", "national_it"};

// Writes the CSV proxies into dir.
void write_proxy_datasets(const std::filesystem::path& dir, std::uint64_t seed);
// Loads the four CSVs from dir (MissingDataset if any is absent) and generates
// the city series.
std::vector<Dataset> load_datasets(const std::filesystem::path& dir,
                                   const std::vector<CityProfile>& cities,
                                   std::uint64_t seed);

}  // namespace dpnego
