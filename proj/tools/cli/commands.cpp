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

#include "cli/commands.hpp"

#include <fmt/format.h>

#if __has_include(<CLI/CLI.hpp>)
#include <CLI/CLI.hpp>
#else
#include <CLI11.hpp>
#endif
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dpnego/audit.hpp"
#include "dpnego/config.hpp"
#include "dpnego/error.hpp"
#include "dpnego/explain.hpp"
#include "dpnego/ingest.hpp"
#include "dpnego/json.hpp"
#include "dpnego/owner.hpp"
#include "dpnego/random.hpp"
#include "dpnego/simulation.hpp"
#include "dpnego/tss.hpp"

namespace dpnego::cli {
namespace {

namespace fs = std::filesystem;

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = "out";
  std::string format = "json";
  int verbosity = 0;
};

struct Context {
  Common common;
  std::ostream& out;
  std::ostream& err;

  Config config() const {
    return common.config_path.empty() ? Config::defaults()
                                      : load_config(common.config_path);
  }
  std::uint64_t seed(const Config& cfg) const {
    return common.seed.value_or(cfg.seed);
  }
  fs::path out_dir() const {
    fs::path p(common.out_dir);
    fs::create_directories(p);
    return p;
  }
  void log(const std::string& msg) const {
    if (common.verbosity > 0) err << msg << '\n';
  }
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json read_json(const fs::path& path) {
  try {
    return parse_json(read_file(path));
  } catch (const Error& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << text;
}

void write_json(const fs::path& path, const Json& j) {
  write_text(path, j.dump(2) + "\n");
}

// Files are always written; stdout mirrors one of them per --format.
void emit(const Context& ctx, const fs::path& summary, const fs::path& csv) {
  ctx.out << read_file(ctx.common.format == "csv" ? csv : summary);
}

int cmd_negotiate(const Context& ctx, const std::string& request_path,
                  const std::string& owner_path, const std::string& audit_path,
                  const std::string& owner_out, const std::string& timestamp) {
  const auto cfg = ctx.config();
  const auto req = request_from_json(read_json(request_path));

  OwnerState owner;
  if (!owner_path.empty()) {
    owner = owner_from_json(read_json(owner_path), cfg.trust);
  } else {
    owner.owner_id = req.owner_id;
    owner.ledger = BudgetLedger(cfg.full_sim.ecosystem.initial_budget);
    owner.trust = TrustBook(cfg.trust);
  }

  const Engine engine(cfg.engine, cfg.catalog);
  const auto validated = validate_request(req, cfg.catalog);
  const auto trace =
      engine.negotiate_traced(validated, owner.ledger.h_remaining(),
                              owner.trust.score(req.requester_id));
  const auto ex =
      explain(req, trace.outcome, trace.factors, cfg.engine, cfg.explain);

  if (trace.outcome.decision() == Decision::Approve) {
    owner.ledger.settle("c-" + ex.trace_id, *trace.outcome.epsilon_star());
  }
  if (!audit_path.empty()) {
    AuditLog log = AuditLog::open(audit_path);
    log.append(req, trace.outcome, ex, timestamp);
    owner.audit_head = log.head();
  }
  if (!owner_out.empty()) write_json(owner_out, owner_to_json(owner));

  Json outcome = trace.outcome;
  if (ctx.common.format == "json") {
    ctx.out << outcome.dump(2) << "\n\n" << ex.text << '\n';
  } else {
    ctx.out << outcome.dump() << '\n' << ex.text << '\n';
  }
  return trace.outcome.decision() == Decision::Reject ? kExitRejected
                                                      : kExitOk;
}

Json with_seed(std::uint64_t seed, Json body) {
  Json j{{"seed", seed}};
  j.update(body);
  return j;
}

int cmd_simulate(const Context& ctx, std::optional<int> interactions) {
  auto cfg = ctx.config();
  if (interactions) cfg.full_sim.interactions = *interactions;
  cfg.validate();
  const auto seed = ctx.seed(cfg);
  if (cfg.full_sim.interactions == 0) {
    ctx.err << "warning: zero interactions requested; rates are undefined\n";
  }
  auto eco = gen_ecosystem(derive_seed(seed, 1), cfg.full_sim.ecosystem);
  const auto m = run_full_sim(cfg, eco, seed, nullptr);
  const auto dir = ctx.out_dir();
  write_metrics_csv(dir / "simulate_metrics.csv", {m});
  write_json(dir / "simulate_summary.json",
             with_seed(seed, {{"metrics", summary_json(m)}}));
  emit(ctx, dir / "simulate_summary.json", dir / "simulate_metrics.csv");
  return kExitOk;
}

int cmd_probe(const Context& ctx, double perturbation) {
  const auto cfg = ctx.config();
  const auto seed = ctx.seed(cfg);
  auto eco = gen_ecosystem(derive_seed(seed, 1), cfg.full_sim.ecosystem);
  std::vector<ReplayItem> replay;
  run_full_sim(cfg, eco, seed, &replay);
  const auto r = robustness_probe(cfg, replay, perturbation,
                                  derive_seed(seed, 0x9be));
  const auto dir = ctx.out_dir();
  std::string csv = "index,before,after,threshold_crossed\n";
  bool all_crossed = true;
  for (const auto& f : r.flips) {
    csv += fmt::format("{},{},{},{}\n", f.index, to_string(f.before),
                       to_string(f.after), f.threshold_crossed);
    all_crossed = all_crossed && f.threshold_crossed;
  }
  write_text(dir / "probe_flips.csv", csv);
  write_json(dir / "probe_summary.json",
             with_seed(seed, {{"perturbation", perturbation},
                              {"requests", r.requests},
                              {"unchanged", r.unchanged},
                              {"stability", r.stability},
                              {"flips", r.flips.size()},
                              {"flips_all_threshold_crossings", all_crossed},
                              {"mean_eps_drift", r.mean_eps_drift}}));
  emit(ctx, dir / "probe_summary.json", dir / "probe_flips.csv");
  return kExitOk;
}

std::pair<int, int> parse_range(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw Error(ErrorCode::InvalidArgument,
                "--eps0-range expects LO:HI, got '" + text + "'");
  }
  try {
    return {std::stoi(text.substr(0, colon)), std::stoi(text.substr(colon + 1))};
  } catch (const std::exception&) {
    throw Error(ErrorCode::InvalidArgument, "bad --eps0-range '" + text + "'");
  }
}

int cmd_sweep(const Context& ctx, const std::string& range,
              std::optional<int> interactions) {
  auto cfg = ctx.config();
  if (!range.empty()) {
    std::tie(cfg.sweep.eps0_lo, cfg.sweep.eps0_hi) = parse_range(range);
  }
  if (interactions) cfg.sweep.interactions = *interactions;
  cfg.validate();
  const auto seed = ctx.seed(cfg);
  const auto rows = run_sweep(cfg, seed);
  const auto dir = ctx.out_dir();
  std::vector<ScenarioMetrics> metrics;
  Json jrows = Json::array();
  for (const auto& r : rows) {
    metrics.push_back(r.metrics);
    jrows.push_back({{"eps0", r.eps0},
                     {"regime", r.regime},
                     {"metrics", summary_json(r.metrics)}});
  }
  write_metrics_csv(dir / "sweep_metrics.csv", metrics);
  write_sweep_csv(dir / "sweep_plot.csv", rows);
  write_json(dir / "sweep_summary.json", with_seed(seed, {{"rows", jrows}}));
  emit(ctx, dir / "sweep_summary.json", dir / "sweep_plot.csv");
  return kExitOk;
}

int cmd_baseline(const Context& ctx, std::optional<double> eps_fix,
                 std::optional<int> interactions) {
  auto cfg = ctx.config();
  if (eps_fix) cfg.baseline.eps_fix = *eps_fix;
  if (interactions) cfg.baseline.interactions = *interactions;
  cfg.validate();
  const auto m = run_baseline_fixed(cfg.baseline);
  const auto dir = ctx.out_dir();
  write_metrics_csv(dir / "baseline_metrics.csv", {m});
  write_json(dir / "baseline_summary.json",
             with_seed(ctx.seed(cfg), {{"eps_fix", cfg.baseline.eps_fix},
                                       {"metrics", summary_json(m)}}));
  emit(ctx, dir / "baseline_summary.json", dir / "baseline_metrics.csv");
  return kExitOk;
}

int cmd_adversary(const Context& ctx) {
  const auto cfg = ctx.config();
  const auto seed = ctx.seed(cfg);
  const auto r = run_adversary_trust_inflation(cfg, seed);
  const auto dir = ctx.out_dir();
  write_metrics_csv(dir / "adversary_metrics.csv", {r.metrics});
  std::string trace = "step,trust,remaining\n";
  for (std::size_t i = 0; i < r.trust_trace.size(); ++i) {
    trace += fmt::format("{},{},{}\n", i + 1, r.trust_trace[i],
                         r.budget_trace[i]);
  }
  write_text(dir / "adversary_trace.csv", trace);
  const double peak = r.trust_trace.empty()
                          ? 0.0
                          : *std::max_element(r.trust_trace.begin(),
                                              r.trust_trace.end());
  write_json(dir / "adversary_summary.json",
             with_seed(seed, {{"metrics", summary_json(r.metrics)},
                              {"final_budget", r.final_budget},
                              {"peak_trust", peak}}));
  emit(ctx, dir / "adversary_summary.json", dir / "adversary_metrics.csv");
  return kExitOk;
}

int cmd_cross_dataset(const Context& ctx, const std::string& data_dir,
                      std::optional<int> interactions) {
  const auto cfg = ctx.config();
  const auto seed = ctx.seed(cfg);
  const auto dir = ctx.out_dir();
  fs::path data = data_dir;
  if (data.empty()) {
    data = dir / "data";
    write_proxy_datasets(data, seed);
    ctx.log("wrote proxy datasets to " + data.string());
  }
  const auto datasets = load_datasets(data, cfg.cities, seed);
  const auto rows = run_cross_dataset(cfg, datasets, seed, interactions.value_or(-1));

  Json scenarios = Json::array();
  std::vector<double> rates;
  for (const auto& m : rows) {
    scenarios.push_back(summary_json(m));
    if (m.accept_rate) rates.push_back(*m.accept_rate);
  }
  Json agg;
  if (!rates.empty()) {
    double sum = 0.0;
    for (double a : rates) sum += a;
    const double mean = sum / static_cast<double>(rates.size());
    double ss = 0.0;
    for (double a : rates) ss += (a - mean) * (a - mean);
    const auto [lo, hi] = std::minmax_element(rates.begin(), rates.end());
    agg = {{"mean_accept", mean},
           {"stddev_accept", std::sqrt(ss / static_cast<double>(rates.size()))},
           {"min_accept", *lo},
           {"max_accept", *hi},
           {"spread", *hi - *lo}};
  }
  write_metrics_csv(dir / "cross_dataset_metrics.csv", rows);
  write_json(dir / "cross_dataset_summary.json",
             with_seed(seed, {{"scenarios", scenarios}, {"aggregate", agg}}));
  emit(ctx, dir / "cross_dataset_summary.json",
       dir / "cross_dataset_metrics.csv");
  return kExitOk;
}

int cmd_bench(const Context& ctx, std::optional<int> iterations) {
  const auto cfg = ctx.config();
  const auto seed = ctx.seed(cfg);
  const auto r =
      bench_latency(cfg, iterations.value_or(cfg.bench.iterations), seed);
  const auto dir = ctx.out_dir();
  const auto j = summary_json(r);
  write_json(dir / "bench_summary.json", j);
  std::string csv;
  std::string header;
  for (const auto& [k, v] : j.items()) {
    header += (header.empty() ? "" : ",") + k;
    csv += (csv.empty() ? "" : ",") + v.dump();
  }
  write_text(dir / "bench_metrics.csv", header + "\n" + csv + "\n");
  emit(ctx, dir / "bench_summary.json", dir / "bench_metrics.csv");
  return kExitOk;
}

int cmd_audit_verify(const Context& ctx, const std::string& path) {
  if (!fs::exists(path)) throw Error(ErrorCode::Io, "no such file: " + path);
  const auto report = verify_chain_file(path);
  if (report.ok()) {
    ctx.out << fmt::format("ok: {} records\n", report.records);
    return kExitOk;
  }
  ctx.out << fmt::format("corrupt: first bad record {}\n", *report.first_corrupt);
  return kExitAuditCorrupt;
}

int cmd_tss_split(const Context& ctx, const std::string& secret_hex,
                  std::optional<int> k, std::optional<int> n) {
  const auto cfg = ctx.config();
  const auto shares = split(field_from_hex(secret_hex), k.value_or(cfg.tss.k),
                            n.value_or(cfg.tss.n), ctx.seed(cfg));
  Json j = Json::array();
  for (const auto& s : shares) j.push_back(s);
  ctx.out << j.dump(2) << '\n';
  return kExitOk;
}

int cmd_tss_reconstruct(const Context& ctx, const std::string& path) {
  const auto j = read_json(path);
  if (!j.is_array()) {
    throw Error(ErrorCode::SchemaMismatch, "shares file must be a JSON array");
  }
  std::vector<KeyShare> shares;
  for (const auto& s : j) shares.push_back(share_from_json(s));
  ctx.out << to_hex(reconstruct(shares)) << '\n';
  return kExitOk;
}

int cmd_gen_data(const Context& ctx) {
  const auto cfg = ctx.config();
  const auto dir = ctx.out_dir();
  write_proxy_datasets(dir, ctx.seed(cfg));
  for (const auto& d : kCsvDatasets) {
    ctx.out << (dir / (std::string(d) + ".csv")).string() << '\n';
  }
  return kExitOk;
}

int cmd_config_dump(const Context& ctx) {
  ctx.out << config_to_json(ctx.config()).dump(2) << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Privacy-budget negotiation toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  Context ctx{{}, out, err};
  auto& c = ctx.common;
  app.add_option("--config", c.config_path, "JSON config (defaults if absent)")
      ->check(CLI::ExistingFile);
  app.add_option("--seed", c.seed, "RNG seed (default from config: 7)");
  app.add_option("--out", c.out_dir, "Output directory, created if absent");
  app.add_option("--format", c.format, "stdout format")
      ->check(CLI::IsMember({"json", "csv"}));
  app.add_flag("-v,--verbose", c.verbosity, "More diagnostics on stderr");

  std::function<int()> action;

  auto* neg = app.add_subcommand("negotiate", "Negotiate one request");
  std::string req_path, owner_path, audit_path, owner_out;
  std::string timestamp = "1970-01-01T00:00:00Z";
  neg->add_option("--request", req_path, "Request JSON")->required();
  neg->add_option("--owner", owner_path, "Owner state JSON (fresh if absent)");
  neg->add_option("--audit", audit_path, "Append a record to this audit log");
  neg->add_option("--owner-out", owner_out, "Write the updated owner state");
  neg->add_option("--timestamp", timestamp, "Audit record timestamp");
  neg->callback([&] {
    action = [&] {
      return cmd_negotiate(ctx, req_path, owner_path, audit_path, owner_out,
                           timestamp);
    };
  });

  std::optional<int> interactions;
  auto* sim = app.add_subcommand("simulate", "Multi-prosumer simulation");
  sim->add_option("--interactions", interactions)->check(CLI::NonNegativeNumber);
  sim->callback([&] { action = [&] { return cmd_simulate(ctx, interactions); }; });

  double perturbation = 0.05;
  auto* probe = app.add_subcommand("probe", "Explanation robustness probe");
  probe->add_option("--perturbation", perturbation, "Relative jitter on T and S");
  probe->callback([&] { action = [&] { return cmd_probe(ctx, perturbation); }; });

  std::string range;
  auto* sweep = app.add_subcommand("sweep", "Initial-budget sweep");
  sweep->add_option("--eps0-range", range, "LO:HI (integers)");
  sweep->add_option("--interactions", interactions)->check(CLI::NonNegativeNumber);
  sweep->callback(
      [&] { action = [&] { return cmd_sweep(ctx, range, interactions); }; });

  std::optional<double> eps_fix;
  auto* base = app.add_subcommand("baseline", "Fixed-epsilon baseline");
  base->add_option("--eps-fix", eps_fix, "Per-request epsilon");
  base->add_option("--interactions", interactions)->check(CLI::NonNegativeNumber);
  base->callback([&] {
    action = [&] { return cmd_baseline(ctx, eps_fix, interactions); };
  });

  auto* adv = app.add_subcommand("adversary", "Trust-inflation adversary");
  adv->callback([&] { action = [&] { return cmd_adversary(ctx); }; });

  std::string data_dir;
  auto* cross = app.add_subcommand("cross-dataset", "48-scenario stability run");
  cross->add_option("--data", data_dir, "CSV directory (proxies if absent)");
  cross->add_option("--interactions", interactions)->check(CLI::NonNegativeNumber);
  cross->callback([&] {
    action = [&] { return cmd_cross_dataset(ctx, data_dir, interactions); };
  });

  std::optional<int> iterations;
  auto* bench = app.add_subcommand("bench", "Latency measurement");
  bench->add_option("--iterations", iterations)->check(CLI::PositiveNumber);
  bench->callback([&] { action = [&] { return cmd_bench(ctx, iterations); }; });

  auto* audit = app.add_subcommand("audit", "Audit log tools");
  audit->require_subcommand(1);
  audit->fallthrough();
  std::string log_path;
  auto* verify = audit->add_subcommand("verify", "Check the hash chain");
  verify->add_option("log", log_path)->required();
  verify->callback(
      [&] { action = [&] { return cmd_audit_verify(ctx, log_path); }; });

  auto* tss = app.add_subcommand("tss", "Threshold secret sharing");
  tss->require_subcommand(1);
  tss->fallthrough();
  std::string secret, shares_path;
  std::optional<int> k, n;
  auto* tsplit = tss->add_subcommand("split", "Split a hex secret");
  tsplit->add_option("--secret", secret, "Hex field element")->required();
  tsplit->add_option("-k", k, "Threshold");
  tsplit->add_option("-n", n, "Share count");
  tsplit->callback(
      [&] { action = [&] { return cmd_tss_split(ctx, secret, k, n); }; });
  auto* trec = tss->add_subcommand("reconstruct", "Recover from shares");
  trec->add_option("--shares", shares_path, "JSON array of shares")->required();
  trec->callback(
      [&] { action = [&] { return cmd_tss_reconstruct(ctx, shares_path); }; });

  auto* gen = app.add_subcommand("gen-data", "Write proxy CSV datasets to --out");
  gen->callback([&] { action = [&] { return cmd_gen_data(ctx); }; });

  auto* cfgcmd = app.add_subcommand("config", "Print the effective config");
  cfgcmd->callback([&] { action = [&] { return cmd_config_dump(ctx); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    return action ? action() : kExitUsage;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ChainCorrupt) {
      err << "error: " << e.what() << '\n';
      return kExitAuditCorrupt;
    }
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace dpnego::cli
