// Copyright 2026 The dse Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dse/objective.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "dse/error.hpp"

namespace dse {

std::string to_string(ObjectiveKind kind) {
  switch (kind) {
    case ObjectiveKind::kThroughputPerArea:
      return "throughput_per_area";
    case ObjectiveKind::kGeomeanSpeedup:
      return "geomean_speedup";
  }
  return "unknown";
}

ObjectiveKind objective_from_string(const std::string& s) {
  if (s == "throughput_per_area") return ObjectiveKind::kThroughputPerArea;
  if (s == "geomean_speedup") return ObjectiveKind::kGeomeanSpeedup;
  throw ParseError("unknown objective '" + s + "'");
}

void StudySpec::validate() const {
  if (trial_budget < 1) throw ValidationError("spec.trial_budget must be >= 1");
  if (n_seeds < 1) throw ValidationError("spec.n_seeds must be >= 1");
  if (max_concurrent < 1) throw ValidationError("spec.max_concurrent must be >= 1");
  if (area_budget_mm2 && !(*area_budget_mm2 > 0))
    throw ValidationError("spec.area_budget_mm2 must be > 0");
  for (const auto& [w, t] : latency_budget_s)
    if (!(t > 0)) throw ValidationError("spec.latency_budget_s[" + w + "] must be > 0");
  std::set<std::string> seen;
  for (const auto& w : workloads)
    if (!seen.insert(w).second) throw ValidationError("spec.workloads repeats '" + w + "'");
  if (optimizer.kind.empty()) throw ValidationError("spec.optimizer.kind is empty");
}

namespace {

// get<std::size_t>() silently wraps negative numbers.
std::uint64_t count_field(const nlohmann::json& doc, const char* key) {
  const auto& v = doc.at(key);
  if (!v.is_number_unsigned()) throw ParseError(std::string("spec.") + key + " must be a non-negative integer");
  return v.get<std::uint64_t>();
}

}  // namespace

StudySpec StudySpec::from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ParseError("spec: document is not an object");
  static const std::set<std::string> known = {
      "name", "objective", "workloads", "area_budget_mm2", "latency_budget_s",
      "trial_budget", "n_seeds", "first_seed", "max_concurrent", "optimizer",
      "space_file", "suite_file", "calibration_file"};
  for (const auto& [key, _] : doc.items())
    if (!known.contains(key)) throw ParseError("spec: unknown field '" + key + "'");
  StudySpec s;
  try {
    if (doc.contains("name")) s.name = doc.at("name").get<std::string>();
    if (doc.contains("objective"))
      s.objective = objective_from_string(doc.at("objective").get<std::string>());
    if (doc.contains("workloads")) s.workloads = doc.at("workloads").get<std::vector<std::string>>();
    if (doc.contains("area_budget_mm2") && !doc.at("area_budget_mm2").is_null())
      s.area_budget_mm2 = doc.at("area_budget_mm2").get<double>();
    if (doc.contains("latency_budget_s"))
      s.latency_budget_s = doc.at("latency_budget_s").get<std::map<std::string, double>>();
    if (doc.contains("trial_budget")) s.trial_budget = count_field(doc, "trial_budget");
    if (doc.contains("n_seeds")) s.n_seeds = count_field(doc, "n_seeds");
    if (doc.contains("first_seed")) s.first_seed = count_field(doc, "first_seed");
    if (doc.contains("max_concurrent")) s.max_concurrent = count_field(doc, "max_concurrent");
    if (doc.contains("optimizer")) {
      const auto& o = doc.at("optimizer");
      if (o.is_string()) {
        s.optimizer.kind = o.get<std::string>();
      } else {
        s.optimizer.kind = o.at("kind").get<std::string>();
        if (o.contains("params")) s.optimizer.params = o.at("params");
        if (!s.optimizer.params.is_object()) throw ParseError("spec.optimizer.params is not an object");
      }
    }
    if (doc.contains("space_file")) s.space_file = doc.at("space_file").get<std::string>();
    if (doc.contains("suite_file")) s.suite_file = doc.at("suite_file").get<std::string>();
    if (doc.contains("calibration_file"))
      s.calibration_file = doc.at("calibration_file").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("spec: ") + e.what());
  }
  try {
    s.validate();
  } catch (const ValidationError& e) {
    throw ParseError(e.what());
  }
  return s;
}

StudySpec StudySpec::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("spec file not found: " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("spec file " + path.string() + ": " + e.what());
  }
  auto spec = from_json(doc);
  // Data-file overrides are relative to the spec file.
  auto rebase = [&](std::optional<std::string>& p) {
    if (p && std::filesystem::path(*p).is_relative())
      p = (path.parent_path() / *p).lexically_normal().string();
  };
  rebase(spec.space_file);
  rebase(spec.suite_file);
  rebase(spec.calibration_file);
  return spec;
}

nlohmann::json StudySpec::to_json() const {
  nlohmann::json j = {{"name", name},
                      {"objective", to_string(objective)},
                      {"workloads", workloads},
                      {"area_budget_mm2", nullptr},
                      {"latency_budget_s", latency_budget_s},
                      {"trial_budget", trial_budget},
                      {"n_seeds", n_seeds},
                      {"first_seed", first_seed},
                      {"max_concurrent", max_concurrent},
                      {"optimizer", {{"kind", optimizer.kind}, {"params", optimizer.params}}}};
  if (area_budget_mm2) j["area_budget_mm2"] = *area_budget_mm2;
  if (space_file) j["space_file"] = *space_file;
  if (suite_file) j["suite_file"] = *suite_file;
  if (calibration_file) j["calibration_file"] = *calibration_file;
  return j;
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string StudySpec::hash() const { return fnv1a_hex(to_json().dump()); }

double reward_throughput_per_area(const Evaluation& evaluation, const std::string& workload) {
  auto it = evaluation.latency_s.find(workload);
  if (!evaluation.feasible || it == evaluation.latency_s.end())
    throw ValidationError("throughput_per_area needs a feasible evaluation of '" + workload + "'");
  return (1.0 / it->second) * (1.0 / evaluation.area_mm2);
}

double reward_throughput_per_area(const Evaluation& evaluation,
                                  const std::vector<std::string>& workloads) {
  if (workloads.size() == 1) return reward_throughput_per_area(evaluation, workloads.front());
  double log_sum = 0;
  for (const auto& w : workloads) log_sum += std::log(reward_throughput_per_area(evaluation, w));
  return std::exp(log_sum / static_cast<double>(workloads.size()));
}

double reward_geomean_speedup(const Evaluation& evaluation,
                              const std::map<std::string, double>& baselines) {
  if (!evaluation.feasible || evaluation.latency_s.empty())
    throw ValidationError("geomean_speedup needs a feasible evaluation");
  double log_sum = 0;
  for (const auto& [w, lat] : evaluation.latency_s) {
    auto it = baselines.find(w);
    if (it == baselines.end()) throw ValidationError("missing baseline latency for '" + w + "'");
    log_sum += std::log(it->second) - std::log(lat);
  }
  return std::exp(log_sum / static_cast<double>(evaluation.latency_s.size()));
}

std::vector<std::string> constraint_violations(const Evaluation& evaluation, const StudySpec& spec) {
  std::vector<std::string> out = evaluation.infeasibility_reasons;
  if (!evaluation.feasible && out.empty()) out.emplace_back("infeasible");
  if (spec.area_budget_mm2 && evaluation.area_mm2 > *spec.area_budget_mm2)
    out.emplace_back(reason::kAreaBudget);
  if (evaluation.feasible) {
    for (const auto& [w, tau] : spec.latency_budget_s) {
      auto it = evaluation.latency_s.find(w);
      if (it != evaluation.latency_s.end() && it->second > tau) {
        out.emplace_back(reason::kLatencyBudget);
        break;
      }
    }
  }
  return out;
}

double apply_constraints(const Evaluation& evaluation, const StudySpec& spec, double raw_reward) {
  if (!constraint_violations(evaluation, spec).empty()) return 0.0;
  return std::max(0.0, raw_reward);
}

Scorer::Scorer(const CostModel& model, const WorkloadSuite& suite, StudySpec spec)
    : model_(&model), suite_(&suite), spec_(std::move(spec)) {
  spec_.validate();
  workloads_ = spec_.workloads.empty() ? suite.names() : spec_.workloads;
  for (const auto& w : workloads_) suite.at(w);
  if (spec_.objective == ObjectiveKind::kGeomeanSpeedup) {
    auto all = model.baseline_latencies(suite);
    for (const auto& w : workloads_) {
      auto it = all.find(w);
      if (it == all.end()) throw ValidationError("missing baseline latency for '" + w + "'");
      baselines_[w] = it->second;
    }
  }
}

Score Scorer::score(const AcceleratorConfig& config) const {
  Score s;
  s.evaluation = model_->evaluate(config, *suite_, workloads_);
  s.reasons = constraint_violations(s.evaluation, spec_);
  s.feasible = s.reasons.empty();
  if (s.feasible) {
    const double raw = spec_.objective == ObjectiveKind::kGeomeanSpeedup
                           ? reward_geomean_speedup(s.evaluation, baselines_)
                           : reward_throughput_per_area(s.evaluation, workloads_);
    s.reward = apply_constraints(s.evaluation, spec_, raw);
  }
  return s;
}

}  // namespace dse
