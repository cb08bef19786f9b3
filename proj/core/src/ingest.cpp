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

#include "dpnego/ingest.hpp"

#include <fmt/format.h>

#include <chrono>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>

#include "dpnego/error.hpp"
#include "dpnego/random.hpp"

namespace dpnego {

namespace {

bool read_int(std::string_view s, int& out) {
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size();
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.remove_suffix(1);
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  return s;
}

}  // namespace

Timestamp parse_timestamp(std::string_view text) {
  std::string_view s = trim(text);
  if (s.ends_with("Z")) s.remove_suffix(1);
  else if (s.ends_with("+00:00")) s.remove_suffix(6);
  // YYYY-MM-DDTHH:MM:SS
  if (s.size() != 19 || s[4] != '-' || s[7] != '-' ||
      (s[10] != 'T' && s[10] != ' ') || s[13] != ':' || s[16] != ':') {
    throw Error(ErrorCode::ParseError,
                "bad timestamp '" + std::string(text) + "'");
  }
  int y, mo, d, h, mi, se;
  if (!read_int(s.substr(0, 4), y) || !read_int(s.substr(5, 2), mo) ||
      !read_int(s.substr(8, 2), d) || !read_int(s.substr(11, 2), h) ||
      !read_int(s.substr(14, 2), mi) || !read_int(s.substr(17, 2), se)) {
    throw Error(ErrorCode::ParseError,
                "bad timestamp '" + std::string(text) + "'");
  }
  using namespace std::chrono;
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                           day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || se > 59 || h < 0 || mi < 0 || se < 0) {
    throw Error(ErrorCode::ParseError,
                "invalid date '" + std::string(text) + "'");
  }
  return sys_days(ymd).time_since_epoch().count() * 86400LL + h * 3600LL +
         mi * 60LL + se;
}

std::string format_timestamp(Timestamp t) {
  using namespace std::chrono;
  const auto days_part = static_cast<long>(std::floor(static_cast<double>(t) / 86400.0));
  const long rem = static_cast<long>(t - days_part * 86400LL);
  const year_month_day ymd{sys_days{days{days_part}}};
  return fmt::format("{:04}-{:02}-{:02}T{:02}:{:02}:{:02}Z",
                     static_cast<int>(ymd.year()),
                     static_cast<unsigned>(ymd.month()),
                     static_cast<unsigned>(ymd.day()), rem / 3600,
                     (rem / 60) % 60, rem % 60);
}

std::string_view to_string(CsvSchema s) {
  return s == CsvSchema::Household ? "household" : "national";
}

CsvSchema parse_csv_schema(std::string_view s) {
  if (s == "household") return CsvSchema::Household;
  if (s == "national") return CsvSchema::National;
  throw Error(ErrorCode::InvalidArgument,
              "unknown schema '" + std::string(s) + "'");
}

namespace {

std::string_view header_of(CsvSchema s) {
  return s == CsvSchema::Household ? "timestamp,active_power_kw"
                                   : "timestamp,load_mw";
}

std::optional<Resolution> resolution_for(Timestamp step) {
  for (Resolution r : kAllResolutions) {
    if (std::chrono::duration_cast<std::chrono::seconds>(duration_of(r))
            .count() == step) {
      return r;
    }
  }
  return std::nullopt;
}

}  // namespace

void annotate_spacing(LoadSeries& series) {
  series.gaps.clear();
  series.resolution.reset();
  if (series.timestamps.size() < 2) return;
  Timestamp step = series.timestamps[1] - series.timestamps[0];
  for (std::size_t i = 2; i < series.timestamps.size(); ++i) {
    step = std::min(step, series.timestamps[i] - series.timestamps[i - 1]);
  }
  series.resolution = resolution_for(step);
  for (std::size_t i = 1; i < series.timestamps.size(); ++i) {
    if (series.timestamps[i] - series.timestamps[i - 1] > step) {
      series.gaps.push_back(i);
    }
  }
}

LoadSeries parse_csv(std::istream& in, CsvSchema schema,
                     std::string source_id) {
  LoadSeries s;
  s.source_id = std::move(source_id);
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line) || trim(line) != header_of(schema)) {
    throw Error(ErrorCode::SchemaMismatch,
                "expected header '" + std::string(header_of(schema)) + "'", 1);
  }
  const double scale = schema == CsvSchema::National ? 1000.0 : 1.0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view row = trim(line);
    if (row.empty()) continue;
    const auto comma = row.find(',');
    if (comma == std::string_view::npos ||
        row.find(',', comma + 1) != std::string_view::npos) {
      throw Error(ErrorCode::ParseError, "expected 2 columns", line_no);
    }
    Timestamp t;
    try {
      t = parse_timestamp(row.substr(0, comma));
    } catch (const Error& e) {
      throw Error(ErrorCode::ParseError, e.what(), line_no);
    }
    const std::string_view vs = trim(row.substr(comma + 1));
    double v = 0.0;
    auto [p, ec] = std::from_chars(vs.data(), vs.data() + vs.size(), v);
    if (ec != std::errc() || p != vs.data() + vs.size() || !std::isfinite(v)) {
      throw Error(ErrorCode::ParseError,
                  "bad value '" + std::string(vs) + "'", line_no);
    }
    if (v < 0.0) {
      throw Error(ErrorCode::ParseError, "negative load", line_no);
    }
    if (!s.timestamps.empty() && t <= s.timestamps.back()) {
      throw Error(ErrorCode::NonMonotoneTimestamps,
                  "timestamp not after previous row", line_no);
    }
    s.timestamps.push_back(t);
    s.values_kw.push_back(v * scale);
  }
  annotate_spacing(s);
  return s;
}

LoadSeries load_csv(const std::filesystem::path& path, CsvSchema schema) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return parse_csv(in, schema, path.stem().string());
}

void write_csv(std::ostream& out, const LoadSeries& series, CsvSchema schema) {
  out << header_of(schema) << '\n';
  const double scale = schema == CsvSchema::National ? 1e-3 : 1.0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    out << format_timestamp(series.timestamps[i]) << ','
        << fmt::format("{}", series.values_kw[i] * scale) << '\n';
  }
}

void write_csv(const std::filesystem::path& path, const LoadSeries& series,
               CsvSchema schema) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  write_csv(out, series, schema);
}

SeriesStats series_stats(const LoadSeries& s) {
  SeriesStats st;
  const auto n = static_cast<double>(s.size());
  if (s.size() == 0) return st;
  for (double v : s.values_kw) st.mean += v;
  st.mean /= n;
  for (double v : s.values_kw) st.stddev += (v - st.mean) * (v - st.mean);
  st.stddev = std::sqrt(st.stddev / n);
  if (s.size() > 2) {
    double m = 0.0, m2 = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 1; i < s.size(); ++i) {
      const double base = std::max(s.values_kw[i - 1], 1e-9);
      const double r = (s.values_kw[i] - s.values_kw[i - 1]) / base;
      ++count;
      const double d = r - m;
      m += d / static_cast<double>(count);
      m2 += d * (r - m);
    }
    st.volatility = std::sqrt(m2 / static_cast<double>(count));
  }
  return st;
}

LoadSeries scale_to_household(LoadSeries s, double target_mean_kw) {
  const double mean = series_stats(s).mean;
  if (mean > 0.0) {
    for (double& v : s.values_kw) v *= target_mean_kw / mean;
  }
  return s;
}

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double temperature(double day, double mean, double amp, double phase) {
  return mean - amp * std::cos(kTwoPi * (day - phase) / 365.0);
}

// Evening-peaking daily shape in [0, 1] with a smaller morning bump.
double diurnal_shape(int hour) {
  const double evening = 0.5 + 0.5 * std::cos(kTwoPi * (hour - 19) / 24.0);
  const double morning = std::exp(-0.5 * std::pow((hour - 7.5) / 1.5, 2.0));
  return 0.75 * evening + 0.25 * morning;
}

}  // namespace

Ecosystem gen_ecosystem(std::uint64_t seed, const EcosystemParams& p) {
  Ecosystem eco;
  Rng weather(derive_seed(seed, 0));
  const int hours = p.days * 24;
  std::vector<double> temp(static_cast<std::size_t>(p.days));
  for (int d = 0; d < p.days; ++d) {
    temp[static_cast<std::size_t>(d)] =
        temperature(d, p.temp_mean, p.temp_amplitude, p.temp_phase_day) +
        weather.normal(0.0, p.temp_noise_sd);
  }

  eco.prosumers.reserve(static_cast<std::size_t>(p.prosumers));
  for (int j = 0; j < p.prosumers; ++j) {
    Rng rng(derive_seed(seed, 1 + static_cast<std::uint64_t>(j)));
    const double base = rng.uniform(p.base_lo, p.base_hi);
    const double diurnal = rng.uniform(p.diurnal_lo, p.diurnal_hi);
    const double heating = rng.uniform(p.heating_lo, p.heating_hi);
    const double spike_rate = rng.uniform(p.spike_rate_lo, p.spike_rate_hi);

    Prosumer pr;
    pr.state.owner_id = fmt::format("prosumer-{:03}", j + 1);
    pr.state.ledger = BudgetLedger(p.initial_budget);
    pr.catalog = DataCatalog::defaults();
    pr.series.source_id = pr.state.owner_id;
    pr.series.timestamps.reserve(static_cast<std::size_t>(hours));
    pr.series.values_kw.reserve(static_cast<std::size_t>(hours));
    for (int h = 0; h < hours; ++h) {
      const double t = temp[static_cast<std::size_t>(h / 24)];
      double load = base + diurnal * diurnal_shape(h % 24) +
                    heating * std::max(0.0, p.comfort_temp - t) +
                    rng.normal(0.0, p.noise_sd);
      if (rng.bernoulli(spike_rate)) load += rng.exponential(p.spike_mean_kw);
      pr.series.timestamps.push_back(p.start + 3600LL * h);
      pr.series.values_kw.push_back(std::max(load, 0.0));
    }
    annotate_spacing(pr.series);
    eco.prosumers.push_back(std::move(pr));
  }
  return eco;
}

const std::vector<CityProfile>& default_city_profiles() {
  static const std::vector<CityProfile> profiles = {
      {"Oslo", 0.55, 6.0, 10.0, 15.0, 0.060, 0.005, 0.30, 0.07},
      {"Berlin", 0.50, 10.0, 9.5, 15.0, 0.045, 0.010, 0.35, 0.06},
      {"Rome", 0.45, 16.0, 8.0, 20.0, 0.030, 0.035, 0.40, 0.05},
      {"Paris", 0.50, 12.0, 8.0, 18.0, 0.040, 0.015, 0.35, 0.06},
  };
  return profiles;
}

const CityProfile& find_city(const std::vector<CityProfile>& profiles,
                             std::string_view name) {
  for (const auto& c : profiles) {
    if (c.name == name) return c;
  }
  throw Error(ErrorCode::InvalidArgument,
              "unknown city '" + std::string(name) + "'");
}

LoadSeries gen_city_series(const CityProfile& c, std::uint64_t seed, int days,
                           Timestamp start) {
  Rng rng(seed);
  LoadSeries s;
  s.source_id = c.name;
  double daily_temp = 0.0;
  for (int h = 0; h < days * 24; ++h) {
    if (h % 24 == 0) {
      daily_temp = temperature(h / 24, c.temp_mean, c.temp_amplitude,
                               c.temp_phase_day) +
                   rng.normal(0.0, 2.0);
    }
    const double load = c.base_kw + c.diurnal_amp * diurnal_shape(h % 24) +
                        c.heating_kw_per_deg * std::max(0.0, 18.0 - daily_temp) +
                        c.cooling_kw_per_deg * std::max(0.0, daily_temp - 24.0) +
                        rng.normal(0.0, c.noise_sd);
    s.timestamps.push_back(start + 3600LL * h);
    s.values_kw.push_back(std::max(load, 0.0));
  }
  annotate_spacing(s);
  return s;
}

LoadSeries gen_national_proxy(std::string_view country, std::uint64_t seed,
                              int days, Timestamp start) {
  double mean_mw = 50000.0, swing = 0.18, noise = 0.015;
  if (country == "DE") {
    mean_mw = 56000.0;
  } else if (country == "FR") {
    mean_mw = 62000.0;
    swing = 0.22;
  } else if (country == "IT") {
    mean_mw = 33000.0;
    swing = 0.20;
    noise = 0.02;
  } else {
    throw Error(ErrorCode::InvalidArgument,
                "unknown country '" + std::string(country) + "'");
  }
  Rng rng(seed);
  LoadSeries s;
  s.source_id = "national_" + std::string(country);
  for (int h = 0; h < days * 24; ++h) {
    const int dow = (h / 24 + 1) % 7;  // 2024-01-01 was a Monday
    const double weekend = dow >= 5 ? 0.9 : 1.0;
    const double shape = 1.0 + swing * (diurnal_shape(h % 24) - 0.5);
    const double mw = mean_mw * weekend * shape * (1.0 + rng.normal(0.0, noise));
    s.timestamps.push_back(start + 3600LL * h);
    s.values_kw.push_back(std::max(mw, 0.0) * 1000.0);
  }
  annotate_spacing(s);
  return s;
}

LoadSeries gen_household_proxy(std::uint64_t seed, int days, Timestamp start) {
  EcosystemParams p;
  p.prosumers = 1;
  p.days = days;
  p.start = start;
  auto eco = gen_ecosystem(seed, p);
  LoadSeries s = std::move(eco.prosumers.front().series);
  s.source_id = "uci_household";
  return s;
}

void write_proxy_datasets(const std::filesystem::path& dir,
                          std::uint64_t seed) {
  std::filesystem::create_directories(dir);
  write_csv(dir / "uci_household.csv", gen_household_proxy(derive_seed(seed, 1)),
            CsvSchema::Household);
  const char* countries[] = {"DE", "FR", "IT"};
  for (int i = 0; i < 3; ++i) {
    std::string name = countries[i];
    for (auto& ch : name) ch = static_cast<char>(std::tolower(ch));
    write_csv(dir / ("national_" + name + ".csv"),
              gen_national_proxy(countries[i],
                                 derive_seed(seed, 2 + static_cast<std::uint64_t>(i))),
              CsvSchema::National);
  }
}

std::vector<Dataset> load_datasets(const std::filesystem::path& dir,
                                   const std::vector<CityProfile>& cities,
                                   std::uint64_t seed) {
  std::vector<Dataset> out;
  for (std::string_view name : kCsvDatasets) {
    const auto path = dir / (std::string(name) + ".csv");
    if (!std::filesystem::exists(path)) {
      throw Error(ErrorCode::MissingDataset, path.string() + " not found");
    }
    const bool household = name == "uci_household";
    LoadSeries s = load_csv(path, household ? CsvSchema::Household
                                            : CsvSchema::National);
    if (!household) s = scale_to_household(std::move(s));
    out.push_back({std::string(name), std::move(s)});
  }
  for (std::size_t i = 0; i < cities.size(); ++i) {
    out.push_back({cities[i].name,
                   gen_city_series(cities[i], derive_seed(seed, 100 + i))});
  }
  return out;
}

}  // namespace dpnego
