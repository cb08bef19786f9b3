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

#include "dpnego/config.hpp"

#include <fstream>
#include <sstream>

#include "dpnego/error.hpp"

namespace dpnego {

namespace {

Bundle bundle(std::string name, FeatureSet f, Resolution r, Purpose p,
              double w) {
  return Bundle{std::move(name), std::move(f), r, p, w};
}

using F = Feature;
using R = Resolution;
using P = Purpose;

// A function rather than a global so defaults() is safe during static init.
FeatureSet everything() { return {kAllFeatures.begin(), kAllFeatures.end()}; }

}  // namespace

Config Config::defaults() {
  Config c;

  // Stateless budget probe; the (0.2, 0.25] floor produces counter-offers
  // only when the budget is scarce.
  c.sweep.stream.bundles = {
      bundle("hourly-load", {F::LoadCurve}, R::Hour1, P::Forecasting, 0.05),
      bundle("agg-15min", {F::Aggregate}, R::Min15, P::Billing, 0.20),
      bundle("daily-load", {F::LoadCurve}, R::Daily, P::Forecasting, 0.15),
      bundle("agg-hourly", {F::Aggregate}, R::Hour1, P::Billing, 0.10),
      bundle("agg-daily", {F::Aggregate}, R::Daily, P::GridMonitoring, 0.10),
      bundle("load-5min", {F::LoadCurve}, R::Min5, P::GridMonitoring, 0.08),
      bundle("appliance-hourly", {F::ApplianceLevel}, R::Hour1,
             P::DemandResponse, 0.08),
      bundle("appliance-15min", {F::ApplianceLevel}, R::Min15,
             P::DemandResponse, 0.12),
      bundle("location-15min", {F::Location}, R::Min15, P::PeerTrading, 0.10),
      bundle("location-load-15min", {F::Location, F::LoadCurve}, R::Min15,
             P::Profiling, 0.02),
  };
  c.sweep.eps_min_table = {{0.2, std::nullopt, 0.05},
                           {0.25, std::nullopt, 1.05}};

  c.full_sim.stream.bundles = {
      bundle("utility-billing", {F::Aggregate}, R::Hour1, P::Billing, 0.20),
      bundle("aggregator-forecast", {F::LoadCurve}, R::Min30, P::Forecasting,
             0.18),
      bundle("grid-monitoring", {F::LoadCurve}, R::Min15, P::GridMonitoring,
             0.15),
      bundle("dr-appliance", {F::ApplianceLevel}, R::Hour1, P::DemandResponse,
             0.12),
      bundle("dr-load-appliance", {F::LoadCurve, F::ApplianceLevel}, R::Hour1,
             P::DemandResponse, 0.08),
      bundle("peer-trading", {F::Aggregate}, R::Min15, P::PeerTrading, 0.15),
      bundle("third-party-profiling", everything(), R::Min5, P::Profiling,
             0.12),
  };
  c.full_sim.stream.ask = std::make_pair(0.05, 0.15);

  c.cross_dataset.stream.bundles = {
      bundle("third-party-profiling", everything(), R::Min5, P::Profiling,
             0.40),
      bundle("utility-billing", {F::Aggregate}, R::Hour1, P::Billing, 0.15),
      bundle("aggregator-forecast", {F::LoadCurve}, R::Min30, P::Forecasting,
             0.15),
      bundle("grid-monitoring", {F::LoadCurve}, R::Min15, P::GridMonitoring,
             0.10),
      bundle("dr-appliance", {F::ApplianceLevel}, R::Hour1, P::DemandResponse,
             0.10),
      bundle("peer-trading", {F::Aggregate}, R::Min15, P::PeerTrading, 0.10),
  };
  c.cross_dataset.stream.ask = std::make_pair(0.05, 0.15);
  return c;
}

void Config::validate() const {
  catalog.validate();
  trust.validate();
  engine.validate();
  explain.validate();
  if (release.output_cap < 1 || release.max_steps < 1) {
    throw Error(ErrorCode::InvalidConfig, "release caps must be >= 1");
  }
  if (tss.k < 1 || tss.k > tss.n) {
    throw Error(ErrorCode::InvalidConfig, "tss needs 1 <= k <= n");
  }
  sweep.stream.validate();
  full_sim.stream.validate();
  cross_dataset.stream.validate();
  if (sweep.eps0_lo < 1 || sweep.eps0_hi < sweep.eps0_lo) {
    throw Error(ErrorCode::InvalidConfig, "bad eps0 range");
  }
  if (sweep.interactions < 0 || full_sim.interactions < 0 ||
      cross_dataset.interactions < 0 || baseline.interactions < 0) {
    throw Error(ErrorCode::InvalidConfig, "interactions must be >= 0");
  }
  if (!(baseline.eps_fix > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "eps_fix must be > 0");
  }
  if (full_sim.requesters < 1 || cross_dataset.owners < 1) {
    throw Error(ErrorCode::InvalidConfig, "need at least one party");
  }
}

namespace {

Json rule_json(const EpsMinRule& r) {
  return Json{{"max_sensitivity", r.max_sensitivity},
              {"purpose", r.purpose ? Json(to_string(*r.purpose)) : Json()},
              {"eps_min", r.eps_min}};
}

Json stream_json(const RequestStreamProfile& s) {
  Json bundles = Json::array();
  for (const auto& b : s.bundles) {
    bundles.push_back({{"name", b.name},
                       {"features", features_to_json(b.features)},
                       {"resolution", to_string(b.resolution)},
                       {"purpose", to_string(b.purpose)},
                       {"weight", b.weight}});
  }
  return Json{{"bundles", bundles},
              {"ask", s.ask ? Json::array({s.ask->first, s.ask->second})
                            : Json()},
              {"trust", {s.trust_lo, s.trust_hi}},
              {"counter_policy",
               {{"kind", to_string(s.counter.kind)}, {"p", s.counter.p}}},
              {"window_hours", s.window_hours}};
}

Json term_json(const PowerTerm& t) {
  return Json{{"coef", t.coef}, {"exponent", t.exponent}};
}

template <typename M>
Json table_json(const M& m) {
  Json j = Json::object();
  for (const auto& [k, v] : m) j[std::string(to_string(k))] = v;
  return j;
}

}  // namespace

Json config_to_json(const Config& c) {
  Json rules = Json::array();
  for (const auto& r : c.engine.eps_min_table) rules.push_back(rule_json(r));
  Json sweep_rules = Json::array();
  for (const auto& r : c.sweep.eps_min_table) sweep_rules.push_back(rule_json(r));
  Json cities = Json::array();
  for (const auto& p : c.cities) {
    cities.push_back({{"name", p.name},
                      {"base_kw", p.base_kw},
                      {"temp_mean", p.temp_mean},
                      {"temp_amplitude", p.temp_amplitude},
                      {"temp_phase_day", p.temp_phase_day},
                      {"heating_kw_per_deg", p.heating_kw_per_deg},
                      {"cooling_kw_per_deg", p.cooling_kw_per_deg},
                      {"diurnal_amp", p.diurnal_amp},
                      {"noise_sd", p.noise_sd}});
  }
  const auto& e = c.full_sim.ecosystem;
  const auto& a = c.adversary;
  return Json{
      {"seed", c.seed},
      {"catalog",
       {{"alphas", table_json(c.catalog.alphas)},
        {"attenuation", table_json(c.catalog.attenuation)},
        {"purpose_scores", table_json(c.catalog.purpose_scores)}}},
      {"trust",
       {{"beta", c.trust.beta},
        {"n_sat", c.trust.n_sat},
        {"half_life", c.trust.half_life}}},
      {"engine",
       {{"lambdas", c.engine.lambdas},
        {"objective", to_string(c.engine.objective)},
        {"components",
         {{"utility", term_json(c.engine.components.utility)},
          {"risk", term_json(c.engine.components.risk)},
          {"cost", term_json(c.engine.components.cost)}}},
        {"eps_max", c.engine.eps_max},
        {"grid_step", c.engine.grid_step},
        {"eps_min_table", rules},
        {"default_eps_min", c.engine.default_eps_min},
        {"counter_factor", c.engine.counter_factor},
        {"trusted_min_trust", c.engine.trusted_min_trust},
        {"trusted_max_sensitivity", c.engine.trusted_max_sensitivity},
        {"safety_factor", c.engine.safety_factor},
        {"sensitivity_scale", c.engine.sensitivity_scale}}},
      {"explain",
       {{"lambdas", c.explain.lambdas},
        {"warning_ratio", c.explain.warning_ratio},
        {"reference_sensitivity", c.explain.reference_sensitivity}}},
      {"release",
       {{"output_cap", c.release.output_cap},
        {"max_steps", c.release.max_steps}}},
      {"tss", {{"k", c.tss.k}, {"n", c.tss.n}}},
      {"cities", cities},
      {"sweep",
       {{"stream", stream_json(c.sweep.stream)},
        {"interactions", c.sweep.interactions},
        {"eps0_range", {c.sweep.eps0_lo, c.sweep.eps0_hi}},
        {"eps_min_table", sweep_rules}}},
      {"full_sim",
       {{"stream", stream_json(c.full_sim.stream)},
        {"interactions", c.full_sim.interactions},
        {"requesters", c.full_sim.requesters},
        {"quality", {c.full_sim.quality_lo, c.full_sim.quality_hi}},
        {"alignment", {c.full_sim.alignment_lo, c.full_sim.alignment_hi}},
        {"ecosystem",
         {{"prosumers", e.prosumers},
          {"days", e.days},
          {"initial_budget", e.initial_budget},
          {"start", format_timestamp(e.start)},
          {"temp_mean", e.temp_mean},
          {"temp_amplitude", e.temp_amplitude},
          {"temp_phase_day", e.temp_phase_day},
          {"temp_noise_sd", e.temp_noise_sd},
          {"comfort_temp", e.comfort_temp},
          {"base_kw", {e.base_lo, e.base_hi}},
          {"diurnal_kw", {e.diurnal_lo, e.diurnal_hi}},
          {"heating_kw_per_deg", {e.heating_lo, e.heating_hi}},
          {"spike_rate_per_hour", {e.spike_rate_lo, e.spike_rate_hi}},
          {"spike_mean_kw", e.spike_mean_kw},
          {"noise_sd", e.noise_sd}}}}},
      {"cross_dataset",
       {{"stream", stream_json(c.cross_dataset.stream)},
        {"interactions", c.cross_dataset.interactions},
        {"owners", c.cross_dataset.owners},
        {"initial_budget", c.cross_dataset.initial_budget},
        {"risk_scales", c.cross_dataset.risk_scales},
        {"natural_accept", c.cross_dataset.natural_accept},
        {"calibrated_accept",
         {c.cross_dataset.calibrated_lo, c.cross_dataset.calibrated_hi}}}},
      {"baseline",
       {{"eps_fix", c.baseline.eps_fix},
        {"interactions", c.baseline.interactions},
        {"initial_budget", c.baseline.initial_budget}}},
      {"adversary",
       {{"features", features_to_json(a.bundle.features)},
        {"resolution", to_string(a.bundle.resolution)},
        {"purpose", to_string(a.bundle.purpose)},
        {"warmup_ask", a.warmup_ask},
        {"trust_target", a.trust_target},
        {"reject_streak", a.reject_streak},
        {"max_interactions", a.max_interactions},
        {"initial_budget", a.initial_budget}}},
      {"bench",
       {{"iterations", c.bench.iterations},
        {"short_days", c.bench.short_days},
        {"long_days", c.bench.long_days}}}};
}

namespace {

// Rejects keys of `patch` that the defaults document does not have. Arrays
// are replaced wholesale so their contents are not compared.
void check_keys(const Json& patch, const Json& base, const std::string& path) {
  if (!patch.is_object()) return;
  for (const auto& [key, value] : patch.items()) {
    auto it = base.find(key);
    if (it == base.end()) {
      throw Error(ErrorCode::InvalidConfig, "unknown config key " + path + key);
    }
    if (value.is_object() && it->is_object()) {
      check_keys(value, *it, path + key + ".");
    }
  }
}

template <typename Enum, typename Parse>
std::map<Enum, double> table_from(const Json& j, Parse parse) {
  std::map<Enum, double> m;
  for (const auto& [k, v] : j.items()) m[parse(k)] = v.template get<double>();
  return m;
}

EpsMinRule rule_from(const Json& j) {
  EpsMinRule r;
  r.max_sensitivity = j.at("max_sensitivity").get<double>();
  if (j.contains("purpose") && !j.at("purpose").is_null()) {
    r.purpose = parse_purpose(j.at("purpose").get<std::string>());
  }
  r.eps_min = j.at("eps_min").get<double>();
  return r;
}

std::pair<double, double> pair_from(const Json& j) {
  if (!j.is_array() || j.size() != 2) {
    throw Error(ErrorCode::InvalidConfig, "expected a [lo, hi] pair");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

RequestStreamProfile stream_from(const Json& j) {
  RequestStreamProfile s;
  for (const auto& b : j.at("bundles")) {
    s.bundles.push_back(bundle(b.at("name").get<std::string>(),
                               features_from_json(b.at("features")),
                               parse_resolution(b.at("resolution").get<std::string>()),
                               parse_purpose(b.at("purpose").get<std::string>()),
                               b.at("weight").get<double>()));
  }
  if (j.contains("ask") && !j.at("ask").is_null()) s.ask = pair_from(j.at("ask"));
  std::tie(s.trust_lo, s.trust_hi) = pair_from(j.at("trust"));
  const auto& cp = j.at("counter_policy");
  s.counter.kind = parse_counter_policy(cp.at("kind").get<std::string>());
  s.counter.p = cp.at("p").get<double>();
  s.window_hours = j.at("window_hours").get<int>();
  return s;
}

PowerTerm term_from(const Json& j) {
  return {j.at("coef").get<double>(), j.at("exponent").get<double>()};
}

Config parse_full(const Json& j) {
  Config c;
  c.seed = j.at("seed").get<std::uint64_t>();

  const auto& cat = j.at("catalog");
  c.catalog.alphas = table_from<Feature>(cat.at("alphas"), parse_feature);
  c.catalog.attenuation =
      table_from<Resolution>(cat.at("attenuation"), parse_resolution);
  c.catalog.purpose_scores =
      table_from<Purpose>(cat.at("purpose_scores"), parse_purpose);

  const auto& tr = j.at("trust");
  c.trust.beta = tr.at("beta").get<std::array<double, 3>>();
  c.trust.n_sat = tr.at("n_sat").get<int>();
  c.trust.half_life = tr.at("half_life").get<double>();

  const auto& en = j.at("engine");
  c.engine.lambdas = en.at("lambdas").get<std::array<double, 5>>();
  c.engine.objective = parse_objective_mode(en.at("objective").get<std::string>());
  c.engine.components.utility = term_from(en.at("components").at("utility"));
  c.engine.components.risk = term_from(en.at("components").at("risk"));
  c.engine.components.cost = term_from(en.at("components").at("cost"));
  c.engine.eps_max = en.at("eps_max").get<double>();
  c.engine.grid_step = en.at("grid_step").get<double>();
  for (const auto& r : en.at("eps_min_table")) {
    c.engine.eps_min_table.push_back(rule_from(r));
  }
  c.engine.default_eps_min = en.at("default_eps_min").get<double>();
  c.engine.counter_factor = en.at("counter_factor").get<double>();
  c.engine.trusted_min_trust = en.at("trusted_min_trust").get<double>();
  c.engine.trusted_max_sensitivity = en.at("trusted_max_sensitivity").get<double>();
  c.engine.safety_factor = en.at("safety_factor").get<double>();
  c.engine.sensitivity_scale = en.at("sensitivity_scale").get<double>();

  const auto& ex = j.at("explain");
  c.explain.lambdas = ex.at("lambdas").get<std::array<double, 4>>();
  c.explain.warning_ratio = ex.at("warning_ratio").get<double>();
  c.explain.reference_sensitivity = ex.at("reference_sensitivity").get<double>();

  c.release.output_cap = j.at("release").at("output_cap").get<int>();
  c.release.max_steps = j.at("release").at("max_steps").get<int>();
  c.tss.k = j.at("tss").at("k").get<int>();
  c.tss.n = j.at("tss").at("n").get<int>();

  c.cities.clear();
  for (const auto& p : j.at("cities")) {
    CityProfile cp;
    cp.name = p.at("name").get<std::string>();
    cp.base_kw = p.at("base_kw").get<double>();
    cp.temp_mean = p.at("temp_mean").get<double>();
    cp.temp_amplitude = p.at("temp_amplitude").get<double>();
    cp.temp_phase_day = p.at("temp_phase_day").get<double>();
    cp.heating_kw_per_deg = p.at("heating_kw_per_deg").get<double>();
    cp.cooling_kw_per_deg = p.at("cooling_kw_per_deg").get<double>();
    cp.diurnal_amp = p.at("diurnal_amp").get<double>();
    cp.noise_sd = p.at("noise_sd").get<double>();
    c.cities.push_back(cp);
  }

  const auto& sw = j.at("sweep");
  c.sweep.stream = stream_from(sw.at("stream"));
  c.sweep.interactions = sw.at("interactions").get<int>();
  const auto range = sw.at("eps0_range").get<std::array<int, 2>>();
  c.sweep.eps0_lo = range[0];
  c.sweep.eps0_hi = range[1];
  c.sweep.eps_min_table.clear();
  for (const auto& r : sw.at("eps_min_table")) {
    c.sweep.eps_min_table.push_back(rule_from(r));
  }

  const auto& fs = j.at("full_sim");
  c.full_sim.stream = stream_from(fs.at("stream"));
  c.full_sim.interactions = fs.at("interactions").get<int>();
  c.full_sim.requesters = fs.at("requesters").get<int>();
  std::tie(c.full_sim.quality_lo, c.full_sim.quality_hi) =
      pair_from(fs.at("quality"));
  std::tie(c.full_sim.alignment_lo, c.full_sim.alignment_hi) =
      pair_from(fs.at("alignment"));
  const auto& ec = fs.at("ecosystem");
  auto& e = c.full_sim.ecosystem;
  e.prosumers = ec.at("prosumers").get<int>();
  e.days = ec.at("days").get<int>();
  e.initial_budget = ec.at("initial_budget").get<double>();
  e.start = parse_timestamp(ec.at("start").get<std::string>());
  e.temp_mean = ec.at("temp_mean").get<double>();
  e.temp_amplitude = ec.at("temp_amplitude").get<double>();
  e.temp_phase_day = ec.at("temp_phase_day").get<double>();
  e.temp_noise_sd = ec.at("temp_noise_sd").get<double>();
  e.comfort_temp = ec.at("comfort_temp").get<double>();
  std::tie(e.base_lo, e.base_hi) = pair_from(ec.at("base_kw"));
  std::tie(e.diurnal_lo, e.diurnal_hi) = pair_from(ec.at("diurnal_kw"));
  std::tie(e.heating_lo, e.heating_hi) = pair_from(ec.at("heating_kw_per_deg"));
  std::tie(e.spike_rate_lo, e.spike_rate_hi) =
      pair_from(ec.at("spike_rate_per_hour"));
  e.spike_mean_kw = ec.at("spike_mean_kw").get<double>();
  e.noise_sd = ec.at("noise_sd").get<double>();

  const auto& cd = j.at("cross_dataset");
  c.cross_dataset.stream = stream_from(cd.at("stream"));
  c.cross_dataset.interactions = cd.at("interactions").get<int>();
  c.cross_dataset.owners = cd.at("owners").get<int>();
  c.cross_dataset.initial_budget = cd.at("initial_budget").get<double>();
  c.cross_dataset.risk_scales = cd.at("risk_scales").get<std::vector<double>>();
  c.cross_dataset.natural_accept = cd.at("natural_accept").get<double>();
  std::tie(c.cross_dataset.calibrated_lo, c.cross_dataset.calibrated_hi) =
      pair_from(cd.at("calibrated_accept"));

  const auto& bl = j.at("baseline");
  c.baseline.eps_fix = bl.at("eps_fix").get<double>();
  c.baseline.interactions = bl.at("interactions").get<int>();
  c.baseline.initial_budget = bl.at("initial_budget").get<double>();

  const auto& ad = j.at("adversary");
  c.adversary.bundle.features = features_from_json(ad.at("features"));
  c.adversary.bundle.resolution =
      parse_resolution(ad.at("resolution").get<std::string>());
  c.adversary.bundle.purpose = parse_purpose(ad.at("purpose").get<std::string>());
  c.adversary.warmup_ask = ad.at("warmup_ask").get<double>();
  c.adversary.trust_target = ad.at("trust_target").get<double>();
  c.adversary.reject_streak = ad.at("reject_streak").get<int>();
  c.adversary.max_interactions = ad.at("max_interactions").get<int>();
  c.adversary.initial_budget = ad.at("initial_budget").get<double>();

  const auto& be = j.at("bench");
  c.bench.iterations = be.at("iterations").get<int>();
  c.bench.short_days = be.at("short_days").get<int>();
  c.bench.long_days = be.at("long_days").get<int>();
  return c;
}

}  // namespace

Config config_from_json(const Json& j) {
  if (!j.is_object()) {
    throw Error(ErrorCode::InvalidConfig, "config must be a JSON object");
  }
  Json merged = config_to_json(Config::defaults());
  check_keys(j, merged, "");
  merged.merge_patch(j);
  Config c;
  try {
    c = parse_full(merged);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidConfig) throw;
    throw Error(ErrorCode::InvalidConfig, e.what());
  }
  c.validate();
  return c;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return config_from_json(parse_json(buf.str()));
}

}  // namespace dpnego
