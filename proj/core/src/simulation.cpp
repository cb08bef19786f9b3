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

#include "dpnego/simulation.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>

#include "dpnego/config.hpp"
#include "dpnego/digest.hpp"
#include "dpnego/error.hpp"
#include "dpnego/explain.hpp"
#include "dpnego/random.hpp"
#include "dpnego/scoring.hpp"

namespace dpnego {

std::string_view to_string(CounterPolicyKind k) {
  switch (k) {
    case CounterPolicyKind::AlwaysAccept: return "AlwaysAccept";
    case CounterPolicyKind::Probabilistic: return "Probabilistic";
    case CounterPolicyKind::Calibrated: return "Calibrated";
  }
  return "?";
}

CounterPolicyKind parse_counter_policy(std::string_view s) {
  for (auto k : {CounterPolicyKind::AlwaysAccept,
                 CounterPolicyKind::Probabilistic,
                 CounterPolicyKind::Calibrated}) {
    if (to_string(k) == s) return k;
  }
  throw Error(ErrorCode::InvalidConfig,
              "unknown counter policy '" + std::string(s) + "'");
}

void RequestStreamProfile::validate() const {
  if (bundles.empty()) {
    throw Error(ErrorCode::InvalidConfig, "stream has no bundles");
  }
  double sum = 0.0;
  for (const auto& b : bundles) {
    if (!(b.weight >= 0.0)) {
      throw Error(ErrorCode::InvalidConfig, "bundle weight < 0: " + b.name);
    }
    if (b.features.empty()) {
      throw Error(ErrorCode::InvalidConfig, "bundle without features: " + b.name);
    }
    sum += b.weight;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw Error(ErrorCode::InvalidConfig,
                fmt::format("bundle weights sum to {}, not 1", sum));
  }
  if (ask && !(ask->first > 0.0 && ask->first <= ask->second)) {
    throw Error(ErrorCode::InvalidConfig, "ask range must satisfy 0 < lo <= hi");
  }
  if (!(trust_lo >= 0.0 && trust_lo <= trust_hi && trust_hi <= 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "trust range must lie in [0,1]");
  }
  if (!(counter.p >= 0.0 && counter.p <= 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "counter acceptance outside [0,1]");
  }
  if (window_hours < 1) {
    throw Error(ErrorCode::InvalidConfig, "window_hours must be >= 1");
  }
}

std::map<Purpose, double> RequestStreamProfile::purpose_mix() const {
  std::map<Purpose, double> mix;
  for (const auto& b : bundles) mix[b.purpose] += b.weight;
  return mix;
}

void ScenarioMetrics::finalize_rates() {
  const auto decided = accepted + rejected + countered;
  if (decided == 0) {
    accept_rate.reset();
    reject_rate.reset();
    counter_rate.reset();
    return;
  }
  const auto d = static_cast<double>(decided);
  accept_rate = static_cast<double>(accepted) / d;
  reject_rate = static_cast<double>(rejected) / d;
  counter_rate = static_cast<double>(countered) / d;
}

namespace {

Json opt_json(const std::optional<double>& v) { return v ? Json(*v) : Json(); }

std::string decision_log_digest(const std::vector<Decision>& decisions) {
  std::string s;
  s.reserve(decisions.size());
  for (Decision d : decisions) {
    s.push_back(d == Decision::Approve ? 'A'
                : d == Decision::CounterOffer ? 'C' : 'R');
  }
  return sha256_hex(s);
}

std::string opt_cell(const std::optional<double>& v) {
  return v ? fmt::format("{}", *v) : "";
}

}  // namespace

Json summary_json(const ScenarioMetrics& m) {
  return Json{
      {"name", m.name},
      {"interactions", m.interactions},
      {"accepted", m.accepted},
      {"rejected", m.rejected},
      {"countered", m.countered},
      {"counters_taken", m.counters_taken},
      {"accept_rate", opt_json(m.accept_rate)},
      {"reject_rate", opt_json(m.reject_rate)},
      {"counter_rate", opt_json(m.counter_rate)},
      {"rates_defined", m.accept_rate.has_value()},
      {"mean_remaining_fraction", m.mean_remaining_fraction},
      {"min_remaining_fraction", m.min_remaining_fraction},
      {"granted_total", m.granted_total},
      {"exhaustion_index",
       m.exhaustion_index ? Json(*m.exhaustion_index) : Json()},
      {"ledger_violations", m.ledger_violations},
      {"explanation_mismatches", m.explanation_mismatches},
      {"decision_log_sha256", decision_log_digest(m.decisions)}};
}

void write_metrics_csv(const std::filesystem::path& path,
                       const std::vector<ScenarioMetrics>& rows) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << "name,interactions,accepted,rejected,countered,counters_taken,"
         "accept_rate,reject_rate,counter_rate,mean_remaining_fraction,"
         "min_remaining_fraction,granted_total,exhaustion_index\n";
  for (const auto& m : rows) {
    out << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{}\n", m.name,
                       m.interactions, m.accepted, m.rejected, m.countered,
                       m.counters_taken, opt_cell(m.accept_rate),
                       opt_cell(m.reject_rate), opt_cell(m.counter_rate),
                       m.mean_remaining_fraction, m.min_remaining_fraction,
                       m.granted_total,
                       m.exhaustion_index
                           ? std::to_string(*m.exhaustion_index)
                           : std::string());
  }
}

namespace {

std::vector<double> weights_of(const RequestStreamProfile& s) {
  std::vector<double> w;
  w.reserve(s.bundles.size());
  for (const auto& b : s.bundles) w.push_back(b.weight);
  return w;
}

ContractRequest make_request(const Bundle& b, std::string requester,
                             std::string owner, int window_hours,
                             std::optional<double> ask) {
  ContractRequest r;
  r.requester_id = std::move(requester);
  r.owner_id = std::move(owner);
  r.features = b.features;
  r.resolution = b.resolution;
  r.purpose = b.purpose;
  r.window_hours = window_hours;
  r.proposed_epsilon = ask;
  return r;
}

std::optional<double> draw_ask(const RequestStreamProfile& s, Rng& rng) {
  if (!s.ask) return std::nullopt;
  return rng.uniform(s.ask->first, s.ask->second);
}

void count(ScenarioMetrics& m, Decision d) {
  ++m.interactions;
  switch (d) {
    case Decision::Approve: ++m.accepted; break;
    case Decision::CounterOffer: ++m.countered; break;
    case Decision::Reject: ++m.rejected; break;
  }
  m.decisions.push_back(d);
}

void check_ledger(ScenarioMetrics& m, const BudgetLedger& l) {
  if (l.h_remaining() < 0.0 ||
      l.total_granted() > l.h_max() + 1e-6) {
    ++m.ledger_violations;
  }
}

void remaining_fractions(ScenarioMetrics& m,
                         const std::vector<const BudgetLedger*>& ledgers) {
  if (ledgers.empty()) return;
  double sum = 0.0, lo = 1.0;
  for (const auto* l : ledgers) {
    const double f = l->h_remaining() / l->h_max();
    sum += f;
    lo = std::min(lo, f);
    m.granted_total += l->total_granted();
  }
  m.mean_remaining_fraction = sum / static_cast<double>(ledgers.size());
  m.min_remaining_fraction = lo;
}

}  // namespace

std::string regime_label(double eps0) {
  if (eps0 <= 2.0) return "scarce";
  if (eps0 < 4.0) return "transitional";
  if (eps0 <= 7.0) return "stable";
  return "surplus";
}

std::vector<SweepRow> run_sweep(const Config& cfg, std::uint64_t seed) {
  const auto& sc = cfg.sweep;
  sc.stream.validate();
  EngineConfig ec = cfg.engine;
  ec.eps_min_table = sc.eps_min_table;
  const Engine engine(ec, cfg.catalog);
  const auto weights = weights_of(sc.stream);

  std::vector<SweepRow> rows;
  for (int eps0 = sc.eps0_lo; eps0 <= sc.eps0_hi; ++eps0) {
    // Same request stream for every budget level.
    Rng rng(derive_seed(seed, 0x5eed));
    SweepRow row;
    row.eps0 = eps0;
    row.metrics.name = fmt::format("sweep-eps0-{}", eps0);
    row.regime = regime_label(eps0);
    for (int i = 0; i < sc.interactions; ++i) {
      const auto& b = sc.stream.bundles[rng.categorical(weights)];
      const double trust = rng.uniform(sc.stream.trust_lo, sc.stream.trust_hi);
      const auto ask = draw_ask(sc.stream, rng);
      const auto req = make_request(b, fmt::format("r{}", i), "owner",
                                    sc.stream.window_hours, ask);
      const auto trace = engine.negotiate_traced(
          validate_request(req, cfg.catalog), static_cast<double>(eps0), trust);
      count(row.metrics, trace.outcome.decision());
    }
    row.metrics.finalize_rates();
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_sweep_csv(const std::filesystem::path& path,
                     const std::vector<SweepRow>& rows) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << "eps0,accept,reject,counter\n";
  for (const auto& r : rows) {
    out << fmt::format("{},{},{},{}\n", r.eps0, opt_cell(r.metrics.accept_rate),
                       opt_cell(r.metrics.reject_rate),
                       opt_cell(r.metrics.counter_rate));
  }
}

namespace {

bool takes_counter(const CounterPolicy& policy, double calibrated, Rng& rng) {
  switch (policy.kind) {
    case CounterPolicyKind::AlwaysAccept: return true;
    case CounterPolicyKind::Probabilistic: return rng.bernoulli(policy.p);
    case CounterPolicyKind::Calibrated: return rng.bernoulli(calibrated);
  }
  return false;
}

}  // namespace

ScenarioMetrics run_full_sim(const Config& cfg, Ecosystem& eco,
                             std::uint64_t seed,
                             std::vector<ReplayItem>* replay) {
  const auto& fc = cfg.full_sim;
  fc.stream.validate();
  const Engine engine(cfg.engine, cfg.catalog);
  const auto weights = weights_of(fc.stream);
  Rng rng(derive_seed(seed, 0xf011));

  ScenarioMetrics m;
  m.name = "full-sim";
  if (eco.prosumers.empty()) {
    m.finalize_rates();
    return m;
  }
  for (auto& p : eco.prosumers) {
    if (!(p.state.trust.config() == cfg.trust)) p.state.trust = TrustBook(cfg.trust);
  }

  for (int i = 0; i < fc.interactions; ++i) {
    auto& owner = eco.prosumers[rng.below(eco.prosumers.size())];
    const auto requester = fmt::format(
        "requester-{:02}",
        rng.below(static_cast<std::uint64_t>(fc.requesters)) + 1);
    const auto& b = fc.stream.bundles[rng.categorical(weights)];
    const auto ask = draw_ask(fc.stream, rng);
    const bool take = takes_counter(fc.stream.counter, fc.stream.counter.p, rng);
    const double q = rng.uniform(fc.quality_lo, fc.quality_hi);
    const double a = rng.uniform(fc.alignment_lo, fc.alignment_hi);

    OwnerState& st = owner.state;
    const auto req = make_request(b, requester, st.owner_id,
                                  fc.stream.window_hours, ask);
    const auto validated = validate_request(req, owner.catalog);
    const double trust = st.trust.score(requester);
    const double h = st.ledger.h_remaining();
    const auto trace = engine.negotiate_traced(validated, h, trust);
    const auto& outcome = trace.outcome;

    const auto ex =
        explain(req, outcome, trace.factors, cfg.engine, cfg.explain);
    if (ex.decision != outcome.decision()) ++m.explanation_mismatches;

    count(m, outcome.decision());
    if (replay) replay->push_back({req, h, trust, outcome.decision()});

    bool settle = outcome.decision() == Decision::Approve;
    if (outcome.decision() == Decision::CounterOffer && take) {
      settle = true;
      ++m.counters_taken;
    }
    if (settle) {
      st.ledger.settle(fmt::format("c{}", i + 1), *outcome.epsilon_star());
      st.trust.record(requester, TrustEvent::completed());
      st.trust.record(requester, TrustEvent::quality(q));
      st.trust.record(requester, TrustEvent::alignment(a));
      check_ledger(m, st.ledger);
    }
  }

  std::vector<const BudgetLedger*> ledgers;
  for (const auto& p : eco.prosumers) ledgers.push_back(&p.state.ledger);
  remaining_fractions(m, ledgers);
  m.finalize_rates();
  return m;
}

std::vector<ScenarioMetrics> run_cross_dataset(
    const Config& cfg, const std::vector<Dataset>& datasets,
    std::uint64_t seed, int interactions_override) {
  const auto& cc = cfg.cross_dataset;
  cc.stream.validate();
  if (datasets.empty()) {
    throw Error(ErrorCode::MissingDataset, "no datasets supplied");
  }
  const int interactions =
      interactions_override >= 0 ? interactions_override : cc.interactions;
  const auto weights = weights_of(cc.stream);

  // Calibrated counter acceptance follows each dataset's volatility rank.
  std::vector<SeriesStats> stats;
  for (const auto& d : datasets) stats.push_back(series_stats(d.series));
  std::vector<std::size_t> order(datasets.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) {
    return stats[x].volatility < stats[y].volatility;
  });
  std::vector<double> calibrated(datasets.size(), cc.calibrated_hi);
  for (std::size_t r = 0; r < order.size(); ++r) {
    const double q = order.size() > 1
                         ? static_cast<double>(r) /
                               static_cast<double>(order.size() - 1)
                         : 0.0;
    calibrated[order[r]] =
        cc.calibrated_hi - q * (cc.calibrated_hi - cc.calibrated_lo);
  }

  const std::array<std::pair<const char*, CounterPolicy>, 3> patterns = {{
      {"fixed", {CounterPolicyKind::AlwaysAccept, 1.0}},
      {"natural", {CounterPolicyKind::Probabilistic, cc.natural_accept}},
      {"calibrated", {CounterPolicyKind::Calibrated, 0.0}},
  }};

  std::vector<ScenarioMetrics> out;
  for (std::size_t d = 0; d < datasets.size(); ++d) {
    // Volatile sources get slightly less trusted requesters.
    const double shift = -0.2 * std::min(stats[d].volatility, 1.0);
    for (std::size_t p = 0; p < patterns.size(); ++p) {
      for (std::size_t mode = 0; mode < cc.risk_scales.size(); ++mode) {
        EngineConfig ec = cfg.engine;
        ec.sensitivity_scale *= cc.risk_scales[mode];
        const Engine engine(ec, cfg.catalog);
        Rng rng(derive_seed(seed, 1000 + d * 64 + p * 8 + mode));

        ScenarioMetrics m;
        m.name = fmt::format("{}/{}/{}", datasets[d].name, patterns[p].first,
                             mode == 0 ? "mild" : "moderate");
        std::vector<BudgetLedger> ledgers(
            static_cast<std::size_t>(cc.owners),
            BudgetLedger(cc.initial_budget));
        for (int i = 0; i < interactions; ++i) {
          const auto o = rng.below(ledgers.size());
          const auto& b = cc.stream.bundles[rng.categorical(weights)];
          const auto ask = draw_ask(cc.stream, rng);
          const double trust = std::clamp(
              rng.uniform(cc.stream.trust_lo, cc.stream.trust_hi) + shift, 0.0,
              1.0);
          const bool take = takes_counter(patterns[p].second, calibrated[d], rng);
          const auto req = make_request(b, "requester", fmt::format("o{}", o),
                                        cc.stream.window_hours, ask);
          const auto trace = engine.negotiate_traced(
              validate_request(req, cfg.catalog), ledgers[o].h_remaining(),
              trust);
          const auto dec = trace.outcome.decision();
          count(m, dec);
          bool settle = dec == Decision::Approve;
          if (dec == Decision::CounterOffer && take) {
            settle = true;
            ++m.counters_taken;
          }
          if (settle) {
            ledgers[o].settle(fmt::format("c{}", i + 1),
                              *trace.outcome.epsilon_star());
            check_ledger(m, ledgers[o]);
          }
        }
        std::vector<const BudgetLedger*> ptrs;
        for (const auto& l : ledgers) ptrs.push_back(&l);
        remaining_fractions(m, ptrs);
        m.finalize_rates();
        out.push_back(std::move(m));
      }
    }
  }
  return out;
}

ScenarioMetrics run_baseline_fixed(const BaselineConfig& cfg) {
  if (!(cfg.eps_fix > 0.0)) {
    throw Error(ErrorCode::NonPositiveEpsilon, "eps_fix must be > 0");
  }
  BudgetLedger ledger(cfg.initial_budget);
  ScenarioMetrics m;
  m.name = fmt::format("baseline-eps-{}", cfg.eps_fix);
  for (int i = 0; i < cfg.interactions; ++i) {
    if (cfg.eps_fix <= ledger.h_remaining() + kBudgetTolerance) {
      ledger.settle(fmt::format("c{}", i + 1), cfg.eps_fix);
      count(m, Decision::Approve);
      check_ledger(m, ledger);
      if (ledger.h_remaining() == 0.0 && !m.exhaustion_index) {
        m.exhaustion_index = static_cast<std::uint64_t>(i + 1);
      }
    } else {
      count(m, Decision::Reject);
    }
  }
  remaining_fractions(m, {&ledger});
  m.finalize_rates();
  return m;
}

AdversaryResult run_adversary_trust_inflation(const Config& cfg,
                                              std::uint64_t seed) {
  (void)seed;  // the adversary's behavior is fully scripted
  const auto& ac = cfg.adversary;
  const Engine engine(cfg.engine, cfg.catalog);
  OwnerState owner;
  owner.owner_id = "target";
  owner.ledger = BudgetLedger(ac.initial_budget);
  owner.trust = TrustBook(cfg.trust);
  const std::string who = "adversary";

  AdversaryResult res;
  res.metrics.name = "trust-inflation";
  int streak = 0;
  for (int i = 0; i < ac.max_interactions; ++i) {
    const double trust = owner.trust.score(who);
    // Small compliant asks until trust saturates, then take what it can.
    const std::optional<double> ask =
        trust < ac.trust_target ? std::optional<double>(ac.warmup_ask)
                                : std::nullopt;
    const auto req = make_request(ac.bundle, who, owner.owner_id, 24, ask);
    const auto trace = engine.negotiate_traced(
        validate_request(req, cfg.catalog), owner.ledger.h_remaining(), trust);
    const auto dec = trace.outcome.decision();
    count(res.metrics, dec);
    if (dec == Decision::Reject) {
      ++streak;
    } else {
      streak = 0;
      if (dec == Decision::CounterOffer) ++res.metrics.counters_taken;
      owner.ledger.settle(fmt::format("c{}", i + 1),
                          *trace.outcome.epsilon_star());
      owner.trust.record(who, TrustEvent::completed());
      owner.trust.record(who, TrustEvent::quality(1.0));
      owner.trust.record(who, TrustEvent::alignment(1.0));
      check_ledger(res.metrics, owner.ledger);
    }
    res.trust_trace.push_back(owner.trust.score(who));
    res.budget_trace.push_back(owner.ledger.h_remaining());
    if (owner.ledger.h_remaining() == 0.0 && !res.metrics.exhaustion_index) {
      res.metrics.exhaustion_index = static_cast<std::uint64_t>(i + 1);
    }
    if (streak >= ac.reject_streak) break;
  }
  res.final_budget = owner.ledger.h_remaining();
  remaining_fractions(res.metrics, {&owner.ledger});
  res.metrics.finalize_rates();
  return res;
}

namespace {

double percentile(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  const auto k = static_cast<std::size_t>(
      std::min<double>(std::floor(q * static_cast<double>(v.size())),
                       static_cast<double>(v.size() - 1)));
  std::nth_element(v.begin(), v.begin() + static_cast<long>(k), v.end());
  return v[k];
}

}  // namespace

LatencyReport bench_latency(const Config& cfg, int iterations,
                            std::uint64_t seed) {
  using Clock = std::chrono::steady_clock;
  const Engine engine(cfg.engine, cfg.catalog);
  const auto& stream = cfg.full_sim.stream;
  const auto weights = weights_of(stream);
  Rng rng(derive_seed(seed, 0xbe7c));

  std::vector<ContractRequest> pool;
  for (int i = 0; i < 256; ++i) {
    const auto& b = stream.bundles[rng.categorical(weights)];
    pool.push_back(make_request(b, fmt::format("requester-{}", i % 20), "owner",
                                stream.window_hours, draw_ask(stream, rng)));
  }

  // Two owners that differ only in how much raw data they hold.
  EcosystemParams small = cfg.full_sim.ecosystem;
  small.prosumers = 1;
  small.days = cfg.bench.short_days;
  EcosystemParams large = small;
  large.days = cfg.bench.long_days;
  auto eco_short = gen_ecosystem(derive_seed(seed, 1), small);
  auto eco_long = gen_ecosystem(derive_seed(seed, 2), large);
  std::array<Prosumer*, 2> owners = {&eco_short.prosumers[0],
                                     &eco_long.prosumers[0]};

  auto once = [&](const ContractRequest& req, Prosumer& p, double* neg_ms,
                  double* exp_ms) {
    const auto t0 = Clock::now();
    const auto v = validate_request(req, p.catalog);
    const auto trace = engine.negotiate_traced(
        v, p.state.ledger.h_remaining(), p.state.trust.score(req.requester_id));
    const auto t1 = Clock::now();
    const auto ex =
        explain(req, trace.outcome, trace.factors, cfg.engine, cfg.explain);
    const auto t2 = Clock::now();
    if (ex.decision != trace.outcome.decision()) {
      throw Error(ErrorCode::FactorMismatch, "explanation disagrees");
    }
    *neg_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    *exp_ms = std::chrono::duration<double, std::milli>(t2 - t1).count();
  };

  double n_ms = 0.0, e_ms = 0.0;
  for (int i = 0; i < 1000; ++i) {
    once(pool[static_cast<std::size_t>(i) % pool.size()], *owners[i % 2], &n_ms,
         &e_ms);
  }

  LatencyReport r;
  r.iterations = iterations;
  std::vector<double> neg, exp, by_owner[2];
  neg.reserve(static_cast<std::size_t>(iterations));
  exp.reserve(static_cast<std::size_t>(iterations));
  for (int i = 0; i < iterations; ++i) {
    const int which = i % 2;  // interleave so drift hits both equally
    once(pool[static_cast<std::size_t>(i / 2) % pool.size()], *owners[which],
         &n_ms, &e_ms);
    neg.push_back(n_ms);
    exp.push_back(e_ms);
    by_owner[which].push_back(n_ms);
  }
  r.negotiate_median_ms = percentile(neg, 0.5);
  r.negotiate_p99_ms = percentile(neg, 0.99);
  r.explain_median_ms = percentile(exp, 0.5);
  r.explain_p99_ms = percentile(exp, 0.99);
  r.short_data_median_ms = percentile(by_owner[0], 0.5);
  r.long_data_median_ms = percentile(by_owner[1], 0.5);
  return r;
}

Json summary_json(const LatencyReport& r) {
  return Json{{"iterations", r.iterations},
              {"negotiate_median_ms", r.negotiate_median_ms},
              {"negotiate_p99_ms", r.negotiate_p99_ms},
              {"explain_median_ms", r.explain_median_ms},
              {"explain_p99_ms", r.explain_p99_ms},
              {"short_data_median_ms", r.short_data_median_ms},
              {"long_data_median_ms", r.long_data_median_ms}};
}

}  // namespace dpnego
