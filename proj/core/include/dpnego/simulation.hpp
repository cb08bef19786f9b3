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
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dpnego/contract.hpp"
#include "dpnego/engine.hpp"
#include "dpnego/ingest.hpp"
#include "dpnego/json.hpp"

namespace dpnego {

struct Config;

// A requestable feature set at a resolution for one purpose; `weight` is its
// probability within a stream.
struct Bundle {
  std::string name;
  FeatureSet features;
  Resolution resolution = Resolution::Hour1;
  Purpose purpose = Purpose::Billing;
  double weight = 0.0;

  bool operator==(const Bundle&) const = default;
};

enum class CounterPolicyKind { AlwaysAccept, Probabilistic, Calibrated };
std::string_view to_string(CounterPolicyKind k);
CounterPolicyKind parse_counter_policy(std::string_view s);

struct CounterPolicy {
  CounterPolicyKind kind = CounterPolicyKind::AlwaysAccept;
  double p = 1.0;  // Probabilistic only

  bool operator==(const CounterPolicy&) const = default;
};

struct RequestStreamProfile {
  std::vector<Bundle> bundles;
  // Proposed epsilon drawn uniformly from [lo, hi]; absent means uncapped.
  std::optional<std::pair<double, double>> ask;
  // Requester trust drawn uniformly from [lo, hi] where no ledger is kept.
  double trust_lo = 0.3;
  double trust_hi = 0.9;
  CounterPolicy counter;
  int window_hours = 24;

  // Throws InvalidConfig unless weights are non-negative and sum to 1.
  void validate() const;
  // Purpose mix implied by the bundle weights.
  std::map<Purpose, double> purpose_mix() const;

  bool operator==(const RequestStreamProfile&) const = default;
};

struct ScenarioMetrics {
  std::string name;
  std::uint64_t interactions = 0;
  std::uint64_t accepted = 0;
  std::uint64_t rejected = 0;
  std::uint64_t countered = 0;
  std::uint64_t counters_taken = 0;
  // Rates over decided requests; unset when nothing was decided.
  std::optional<double> accept_rate, reject_rate, counter_rate;
  double mean_remaining_fraction = 1.0;
  double min_remaining_fraction = 1.0;
  double granted_total = 0.0;
  std::optional<std::uint64_t> exhaustion_index;  // 1-based request index
  std::uint64_t ledger_violations = 0;
  std::uint64_t explanation_mismatches = 0;
  std::vector<Decision> decisions;

  void finalize_rates();
};

Json summary_json(const ScenarioMetrics& m);
// One row per scenario: name,interactions,accepted,rejected,countered,...
void write_metrics_csv(const std::filesystem::path& path,
                       const std::vector<ScenarioMetrics>& rows);

// --- budget sweep -------------------------------------------------------

struct SweepConfig {
  RequestStreamProfile stream;
  int interactions = 700;
  int eps0_lo = 1;
  int eps0_hi = 10;
  // Replaces the engine's epsilon floor table for this experiment.
  std::vector<EpsMinRule> eps_min_table;

  bool operator==(const SweepConfig&) const = default;
};

struct SweepRow {
  int eps0 = 0;
  ScenarioMetrics metrics;
  std::string regime;
};

std::string regime_label(double eps0);
std::vector<SweepRow> run_sweep(const Config& cfg, std::uint64_t seed);
void write_sweep_csv(const std::filesystem::path& path,
                     const std::vector<SweepRow>& rows);

// --- full simulation ----------------------------------------------------

struct FullSimConfig {
  RequestStreamProfile stream;
  int interactions = 2500;
  int requesters = 20;
  EcosystemParams ecosystem;
  double quality_lo = 0.8, quality_hi = 1.0;
  double alignment_lo = 0.7, alignment_hi = 1.0;

  bool operator==(const FullSimConfig&) const = default;
};

// One negotiation as it was seen: the request and the owner state snapshot.
struct ReplayItem {
  ContractRequest request;
  double h_remaining = 0.0;
  double trust = 0.0;
  Decision decision = Decision::Reject;
};

ScenarioMetrics run_full_sim(const Config& cfg, Ecosystem& eco,
                             std::uint64_t seed,
                             std::vector<ReplayItem>* replay = nullptr);

// --- cross-dataset benchmark --------------------------------------------

struct CrossDatasetConfig {
  RequestStreamProfile stream;
  int interactions = 2000;
  int owners = 100;
  double initial_budget = 8.0;
  std::vector<double> risk_scales{1.0, 1.3};
  double natural_accept = 0.5;
  // Calibrated acceptance spans [lo, hi] across datasets by volatility rank.
  double calibrated_lo = 0.3, calibrated_hi = 0.9;

  bool operator==(const CrossDatasetConfig&) const = default;
};

// Throws MissingDataset when fewer than one dataset is supplied.
std::vector<ScenarioMetrics> run_cross_dataset(
    const Config& cfg, const std::vector<Dataset>& datasets,
    std::uint64_t seed, int interactions_override = -1);

// --- fixed-epsilon baseline ---------------------------------------------

struct BaselineConfig {
  double eps_fix = 0.10;
  int interactions = 2000;
  double initial_budget = 8.0;

  bool operator==(const BaselineConfig&) const = default;
};

ScenarioMetrics run_baseline_fixed(const BaselineConfig& cfg);

// --- trust-inflation adversary ------------------------------------------

struct AdversaryConfig {
  Bundle bundle{"adversary", {Feature::Aggregate}, Resolution::Daily,
                Purpose::Billing, 1.0};
  double warmup_ask = 0.15;
  double trust_target = 0.999;
  int reject_streak = 3;
  int max_interactions = 1000;
  double initial_budget = 8.0;

  bool operator==(const AdversaryConfig&) const = default;
};

struct AdversaryResult {
  ScenarioMetrics metrics;
  std::vector<double> trust_trace;  // trust after each interaction
  std::vector<double> budget_trace;
  double final_budget = 0.0;
};

AdversaryResult run_adversary_trust_inflation(const Config& cfg,
                                              std::uint64_t seed);

// --- robustness probe ---------------------------------------------------

struct ProbeFlip {
  std::size_t index = 0;
  Decision before = Decision::Reject;
  Decision after = Decision::Reject;
  bool threshold_crossed = false;
};

struct ProbeResult {
  std::size_t requests = 0;
  std::size_t unchanged = 0;
  double stability = 1.0;
  std::vector<ProbeFlip> flips;
  // Mean |eps*' - eps*| over requests approved both times.
  double mean_eps_drift = 0.0;
};

// Re-negotiates each item with T and S scaled by independent U[1-p, 1+p]
// factors. Requires 0 <= p < 0.5.
ProbeResult robustness_probe(const Config& cfg,
                             const std::vector<ReplayItem>& items,
                             double perturbation, std::uint64_t seed);

// --- latency ------------------------------------------------------------

struct BenchConfig {
  int iterations = 10000;
  int short_days = 60;
  int long_days = 600;

  bool operator==(const BenchConfig&) const = default;
};

struct LatencyReport {
  int iterations = 0;
  double negotiate_median_ms = 0.0, negotiate_p99_ms = 0.0;
  double explain_median_ms = 0.0, explain_p99_ms = 0.0;
  // Median negotiate latency against owners holding short/long histories.
  double short_data_median_ms = 0.0, long_data_median_ms = 0.0;
};

LatencyReport bench_latency(const Config& cfg, int iterations,
                            std::uint64_t seed);
Json summary_json(const LatencyReport& r);

}  // namespace dpnego
