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

#include "dpnego/release.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dpnego/digest.hpp"
#include "dpnego/error.hpp"

namespace dpnego {

std::string_view to_string(Mechanism m) {
  switch (m) {
    case Mechanism::Laplace: return "Laplace";
    case Mechanism::Gaussian: return "Gaussian";
    case Mechanism::RandomizedRounding: return "RandomizedRounding";
  }
  return "?";
}

Mechanism parse_mechanism(std::string_view s) {
  for (auto m : {Mechanism::Laplace, Mechanism::Gaussian,
                 Mechanism::RandomizedRounding}) {
    if (to_string(m) == s) return m;
  }
  throw Error(ErrorCode::InvalidArgument,
              "unknown mechanism '" + std::string(s) + "'");
}

std::string_view to_string(AggregateKind k) {
  switch (k) {
    case AggregateKind::Sum: return "sum";
    case AggregateKind::Mean: return "mean";
    case AggregateKind::Max: return "max";
    case AggregateKind::Count: return "count";
  }
  return "?";
}

PlanOp PlanOp::select(FeatureSet f) {
  PlanOp op;
  op.kind = Kind::Select;
  op.features = std::move(f);
  return op;
}

PlanOp PlanOp::window(int hours) {
  PlanOp op;
  op.kind = Kind::Window;
  op.hours = hours;
  return op;
}

PlanOp PlanOp::resample(Resolution r) {
  PlanOp op;
  op.kind = Kind::Resample;
  op.resolution = r;
  return op;
}

PlanOp PlanOp::clip(double lo, double hi) {
  PlanOp op;
  op.kind = Kind::Clip;
  op.lo = lo;
  op.hi = hi;
  return op;
}

PlanOp PlanOp::reduce(AggregateKind k) {
  PlanOp op;
  op.kind = Kind::Aggregate;
  op.aggregate = k;
  return op;
}

void validate_plan(const QueryPlan& plan, const ContractRequest& contract,
                   const ReleasePolicy& policy) {
  if (plan.ops.size() > static_cast<std::size_t>(policy.max_steps)) {
    throw Error(ErrorCode::RuntimeBudgetExceeded,
                std::to_string(plan.ops.size()) + " steps, cap " +
                    std::to_string(policy.max_steps));
  }
  if (plan.output_arity < 1) {
    throw Error(ErrorCode::InvalidArgument, "output_arity must be >= 1");
  }
  if (plan.output_arity > policy.output_cap) {
    throw Error(ErrorCode::ArityExceeded,
                "arity " + std::to_string(plan.output_arity) + ", cap " +
                    std::to_string(policy.output_cap));
  }
  if (!(plan.delta > 0.0)) {
    throw Error(ErrorCode::NonPositiveSensitivity, "delta must be > 0");
  }
  if (plan.mechanism == Mechanism::RandomizedRounding && plan.categories < 2) {
    throw Error(ErrorCode::InvalidArgument, "need at least 2 categories");
  }
  for (const auto& op : plan.ops) {
    switch (op.kind) {
      case PlanOp::Kind::Select:
        for (Feature f : op.features) {
          if (!contract.features.contains(f)) {
            throw Error(ErrorCode::ScopeViolation,
                        std::string(to_string(f)) + " is not contracted");
          }
        }
        break;
      case PlanOp::Kind::Window:
        if (op.hours < 1 || op.hours > contract.window_hours) {
          throw Error(ErrorCode::ScopeViolation,
                      "window " + std::to_string(op.hours) +
                          "h outside contracted " +
                          std::to_string(contract.window_hours) + "h");
        }
        break;
      case PlanOp::Kind::Resample:
        if (is_finer(op.resolution, contract.resolution)) {
          throw Error(ErrorCode::ScopeViolation,
                      "resample to " + std::string(to_string(op.resolution)) +
                          " is finer than contracted " +
                          std::string(to_string(contract.resolution)));
        }
        break;
      case PlanOp::Kind::Clip:
        if (!(op.lo <= op.hi)) {
          throw Error(ErrorCode::InvalidArgument, "clip needs lo <= hi");
        }
        break;
      case PlanOp::Kind::Aggregate:
        break;
    }
  }
}

namespace {

std::size_t samples_per(std::chrono::minutes span, Resolution r) {
  return static_cast<std::size_t>(span.count() / duration_of(r).count());
}

std::vector<double> resample_mean(const std::vector<double>& v,
                                  std::size_t group) {
  if (group <= 1) return v;
  std::vector<double> out;
  out.reserve(v.size() / group);
  // Align groups to the most recent sample; a partial leading group is dropped.
  const std::size_t start = v.size() % group;
  for (std::size_t i = start; i + group <= v.size(); i += group) {
    double s = 0.0;
    for (std::size_t j = 0; j < group; ++j) s += v[i + j];
    out.push_back(s / static_cast<double>(group));
  }
  return out;
}

double reduce(const std::vector<double>& v, AggregateKind k) {
  switch (k) {
    case AggregateKind::Sum: return std::accumulate(v.begin(), v.end(), 0.0);
    case AggregateKind::Mean:
      return v.empty() ? 0.0
                       : std::accumulate(v.begin(), v.end(), 0.0) /
                             static_cast<double>(v.size());
    case AggregateKind::Max:
      return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
    case AggregateKind::Count: return static_cast<double>(v.size());
  }
  return 0.0;
}

}  // namespace

std::vector<double> execute_plan(const QueryPlan& plan,
                                 const ContractRequest& contract,
                                 const LocalData& data) {
  if (is_finer(contract.resolution, data.resolution)) {
    throw Error(ErrorCode::DataGap, "data is coarser than the contract");
  }
  const auto group = static_cast<std::size_t>(
      duration_of(contract.resolution) / duration_of(data.resolution));
  const std::size_t window_raw =
      samples_per(std::chrono::hours(contract.window_hours), data.resolution);

  // Working state: one vector per selected feature at the current resolution.
  std::map<Feature, std::vector<double>> cur;
  for (Feature f : contract.features) {
    auto it = data.series.find(f);
    if (it == data.series.end() || it->second.size() < window_raw) {
      throw Error(ErrorCode::DataGap,
                  std::string(to_string(f)) + " does not cover the window");
    }
    std::vector<double> tail(it->second.end() - static_cast<long>(window_raw),
                             it->second.end());
    for (double x : tail) {
      if (!std::isfinite(x)) {
        throw Error(ErrorCode::DataGap, "missing sample in window");
      }
    }
    cur[f] = resample_mean(tail, group);
  }
  Resolution res = contract.resolution;

  for (const auto& op : plan.ops) {
    switch (op.kind) {
      case PlanOp::Kind::Select: {
        std::map<Feature, std::vector<double>> next;
        for (Feature f : op.features) {
          auto it = cur.find(f);
          if (it == cur.end()) {
            throw Error(ErrorCode::ScopeViolation,
                        std::string(to_string(f)) + " not available");
          }
          next.emplace(f, std::move(it->second));
        }
        cur = std::move(next);
        break;
      }
      case PlanOp::Kind::Window: {
        const std::size_t keep =
            samples_per(std::chrono::hours(op.hours), res);
        for (auto& [f, v] : cur) {
          if (v.size() < keep) {
            throw Error(ErrorCode::DataGap, "window exceeds available data");
          }
          v.erase(v.begin(), v.end() - static_cast<long>(keep));
        }
        break;
      }
      case PlanOp::Kind::Resample: {
        const auto g = static_cast<std::size_t>(duration_of(op.resolution) /
                                                duration_of(res));
        for (auto& [f, v] : cur) v = resample_mean(v, g);
        res = op.resolution;
        break;
      }
      case PlanOp::Kind::Clip:
        for (auto& [f, v] : cur) {
          for (double& x : v) x = std::clamp(x, op.lo, op.hi);
        }
        break;
      case PlanOp::Kind::Aggregate:
        for (auto& [f, v] : cur) v = {reduce(v, op.aggregate)};
        break;
    }
  }

  std::vector<double> out;
  for (const auto& [f, v] : cur) out.insert(out.end(), v.begin(), v.end());
  if (out.size() > static_cast<std::size_t>(plan.output_arity)) {
    throw Error(ErrorCode::ArityExceeded,
                "plan produced " + std::to_string(out.size()) +
                    " values, declared " + std::to_string(plan.output_arity));
  }
  return out;
}

double laplace_scale(double delta, double eps) {
  if (!(eps > 0.0)) throw Error(ErrorCode::NonPositiveEpsilon, "eps <= 0");
  if (!(delta > 0.0)) {
    throw Error(ErrorCode::NonPositiveSensitivity, "delta <= 0");
  }
  return delta / eps;
}

double gaussian_sigma(double delta, double eps) {
  return laplace_scale(delta, eps) * std::sqrt(2.0 * std::log(1.25 / kGaussianDelta));
}

double rr_truth_probability(double eps, int categories) {
  if (!(eps > 0.0)) throw Error(ErrorCode::NonPositiveEpsilon, "eps <= 0");
  return 1.0 / (1.0 + (categories - 1) * std::exp(-eps));
}

double sample_laplace(Rng& rng, double b) {
  const double u = rng.uniform_open() - 0.5;
  const double sign = u < 0.0 ? -1.0 : 1.0;
  return -b * sign * std::log(1.0 - 2.0 * std::abs(u));
}

int sample_randomized_rounding(Rng& rng, int truth, int categories,
                               double eps) {
  if (rng.bernoulli(rr_truth_probability(eps, categories))) return truth;
  auto other = static_cast<int>(
      rng.below(static_cast<std::uint64_t>(categories - 1)));
  return other >= truth ? other + 1 : other;
}

SanitizedOutput dp_noise(const std::vector<double>& y, double eps_star,
                         const QueryPlan& plan, std::uint64_t seed,
                         ReleaseToken& token) {
  const double b = laplace_scale(plan.delta, eps_star);  // validates inputs
  token.consume();

  SanitizedOutput out;
  out.mechanism = plan.mechanism;
  out.epsilon_charged = eps_star;
  out.trace_id = sha256_hex(token.contract_id() + "|" + std::to_string(seed))
                     .substr(0, 16);
  Rng rng(seed);
  for (double v : y) {
    switch (plan.mechanism) {
      case Mechanism::Laplace:
        out.values.push_back(v + sample_laplace(rng, b));
        out.noise_trace.push_back(b);
        break;
      case Mechanism::Gaussian: {
        const double sigma = gaussian_sigma(plan.delta, eps_star);
        out.values.push_back(v + rng.normal(0.0, sigma));
        out.noise_trace.push_back(sigma);
        break;
      }
      case Mechanism::RandomizedRounding: {
        const int truth = std::clamp(static_cast<int>(std::lround(v)), 0,
                                     plan.categories - 1);
        out.values.push_back(sample_randomized_rounding(
            rng, truth, plan.categories, eps_star));
        out.noise_trace.push_back(
            rr_truth_probability(eps_star, plan.categories));
        break;
      }
    }
  }
  return out;
}

void compliance_check(const SanitizedOutput& out, const ReleasePolicy& policy) {
  if (out.values.size() > static_cast<std::size_t>(policy.output_cap)) {
    throw Error(ErrorCode::ArityExceeded,
                std::to_string(out.values.size()) + " outputs, cap " +
                    std::to_string(policy.output_cap));
  }
  if (out.noise_trace.size() != out.values.size() || out.values.empty()) {
    throw Error(ErrorCode::UnnoisedOutput,
                "output carries no noise record for every value");
  }
}

QueryPlan plan_from_json(const Json& j) {
  QueryPlan plan;
  try {
    for (const auto& o : j.at("ops")) {
      const auto name = o.at("op").get<std::string>();
      if (name == "select") {
        plan.ops.push_back(PlanOp::select(features_from_json(o.at("features"))));
      } else if (name == "window") {
        plan.ops.push_back(PlanOp::window(o.at("hours").get<int>()));
      } else if (name == "resample") {
        plan.ops.push_back(PlanOp::resample(
            parse_resolution(o.at("resolution").get<std::string>())));
      } else if (name == "clip") {
        plan.ops.push_back(
            PlanOp::clip(o.at("lo").get<double>(), o.at("hi").get<double>()));
      } else if (name == "aggregate") {
        const auto fn = o.at("fn").get<std::string>();
        AggregateKind k;
        if (fn == "sum") k = AggregateKind::Sum;
        else if (fn == "mean") k = AggregateKind::Mean;
        else if (fn == "max") k = AggregateKind::Max;
        else if (fn == "count") k = AggregateKind::Count;
        else throw Error(ErrorCode::NonWhitelistedOp, "aggregate " + fn);
        plan.ops.push_back(PlanOp::reduce(k));
      } else {
        throw Error(ErrorCode::NonWhitelistedOp, "operation '" + name + "'");
      }
    }
    plan.delta = j.at("delta").get<double>();
    plan.output_arity = j.at("output_arity").get<int>();
    if (j.contains("mechanism")) {
      plan.mechanism = parse_mechanism(j.at("mechanism").get<std::string>());
    }
    if (j.contains("categories")) plan.categories = j.at("categories").get<int>();
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::SchemaMismatch, e.what());
  }
  return plan;
}

void to_json(Json& j, const QueryPlan& p) {
  Json ops = Json::array();
  for (const auto& op : p.ops) {
    switch (op.kind) {
      case PlanOp::Kind::Select:
        ops.push_back({{"op", "select"}, {"features", features_to_json(op.features)}});
        break;
      case PlanOp::Kind::Window:
        ops.push_back({{"op", "window"}, {"hours", op.hours}});
        break;
      case PlanOp::Kind::Resample:
        ops.push_back({{"op", "resample"}, {"resolution", to_string(op.resolution)}});
        break;
      case PlanOp::Kind::Clip:
        ops.push_back({{"op", "clip"}, {"lo", op.lo}, {"hi", op.hi}});
        break;
      case PlanOp::Kind::Aggregate:
        ops.push_back({{"op", "aggregate"}, {"fn", to_string(op.aggregate)}});
        break;
    }
  }
  j = Json{{"ops", ops},
           {"delta", p.delta},
           {"output_arity", p.output_arity},
           {"mechanism", to_string(p.mechanism)},
           {"categories", p.categories}};
}

void to_json(Json& j, const SanitizedOutput& o) {
  j = Json{{"values", o.values},
           {"mechanism", to_string(o.mechanism)},
           {"epsilon_charged", o.epsilon_charged},
           {"trace_id", o.trace_id},
           {"noise_trace", o.noise_trace}};
}

}  // namespace dpnego
