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

#include <benchmark/benchmark.h>

#include <vector>

#include "dpnego/config.hpp"
#include "dpnego/explain.hpp"
#include "dpnego/random.hpp"
#include "dpnego/tss.hpp"

namespace {

using namespace dpnego;

std::vector<ContractRequest> request_pool(const Config& cfg, bool with_ask) {
  const auto& stream = cfg.full_sim.stream;
  std::vector<double> w;
  for (const auto& b : stream.bundles) w.push_back(b.weight);
  Rng rng(1);
  std::vector<ContractRequest> pool;
  for (int i = 0; i < 256; ++i) {
    const auto& b = stream.bundles[rng.categorical(w)];
    ContractRequest r;
    r.requester_id = "r";
    r.owner_id = "o";
    r.features = b.features;
    r.resolution = b.resolution;
    r.purpose = b.purpose;
    if (with_ask) r.proposed_epsilon = rng.uniform(0.05, 0.15);
    pool.push_back(r);
  }
  return pool;
}

void BM_Negotiate(benchmark::State& state) {
  const auto cfg = Config::defaults();
  const Engine engine(cfg.engine, cfg.catalog);
  const auto pool = request_pool(cfg, state.range(0) != 0);
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& req = pool[i++ % pool.size()];
    auto t = engine.negotiate_traced(validate_request(req, cfg.catalog), 8.0, 0.6);
    benchmark::DoNotOptimize(t);
  }
}
// 0: uncapped search over the full grid, 1: capped by a small ask
BENCHMARK(BM_Negotiate)->Arg(0)->Arg(1);

void BM_Explain(benchmark::State& state) {
  const auto cfg = Config::defaults();
  const Engine engine(cfg.engine, cfg.catalog);
  const auto pool = request_pool(cfg, false);
  std::vector<NegotiationTrace> traces;
  for (const auto& r : pool) {
    traces.push_back(engine.negotiate_traced(validate_request(r, cfg.catalog), 8.0, 0.6));
  }
  std::size_t i = 0;
  for (auto _ : state) {
    const auto k = i++ % pool.size();
    auto e = explain(pool[k], traces[k].outcome, traces[k].factors, cfg.engine,
                     cfg.explain);
    benchmark::DoNotOptimize(e);
  }
}
BENCHMARK(BM_Explain);

void BM_Reconstruct(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  Rng rng(2);
  const auto shares = split(random_field_element(rng), k, 8, rng);
  const std::vector<KeyShare> pick(shares.begin(), shares.begin() + k);
  for (auto _ : state) {
    auto s = reconstruct(pick);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_Reconstruct)->Arg(2)->Arg(3)->Arg(5)->Arg(8);

}  // namespace

BENCHMARK_MAIN();
