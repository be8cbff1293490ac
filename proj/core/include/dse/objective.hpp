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

#ifndef DSE_OBJECTIVE_HPP_
#define DSE_OBJECTIVE_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dse/costmodel.hpp"

namespace dse {

enum class ObjectiveKind { kThroughputPerArea, kGeomeanSpeedup };

std::string to_string(ObjectiveKind kind);
ObjectiveKind objective_from_string(const std::string& s);

struct OptimizerSpec {
  std::string kind = "evolutionary";
  nlohmann::json params = nlohmann::json::object();
};

// A constrained optimization task: what to maximize, over which workloads,
// under which budgets, and how many trials/seeds/workers to spend on it.
struct StudySpec {
  std::string name = "study";
  ObjectiveKind objective = ObjectiveKind::kGeomeanSpeedup;
  std::vector<std::string> workloads;  // empty: every workload of the suite
  std::optional<double> area_budget_mm2;
  std::map<std::string, double> latency_budget_s;
  std::size_t trial_budget = 4096;
  std::size_t n_seeds = 5;
  std::uint64_t first_seed = 0;
  std::size_t max_concurrent = 16;
  OptimizerSpec optimizer;

  // Optional data-file overrides, resolved relative to the spec file.
  std::optional<std::string> space_file;
  std::optional<std::string> suite_file;
  std::optional<std::string> calibration_file;

  void validate() const;
  static StudySpec from_json(const nlohmann::json& doc);
  static StudySpec load(const std::filesystem::path& path);
  nlohmann::json to_json() const;
  // FNV-1a over the canonical JSON form; stable across runs and platforms.
  std::string hash() const;
};

// (1 / latency) * (1 / area); for several workloads, the geometric mean of the
// per-workload values. Requires a feasible evaluation.
double reward_throughput_per_area(const Evaluation& evaluation, const std::string& workload);
double reward_throughput_per_area(const Evaluation& evaluation,
                                  const std::vector<std::string>& workloads);

// Geometric mean of baseline / latency over the evaluated workloads, in log
// space. Throws ValidationError if a baseline is missing.
double reward_geomean_speedup(const Evaluation& evaluation,
                              const std::map<std::string, double>& baselines);

// 0 when infeasible, over the area budget, or over any latency budget;
// otherwise raw_reward.
double apply_constraints(const Evaluation& evaluation, const StudySpec& spec, double raw_reward);

// Constraint violations of an evaluation under a spec (empty when admissible).
std::vector<std::string> constraint_violations(const Evaluation& evaluation, const StudySpec& spec);

struct Score {
  Evaluation evaluation;
  double reward = 0;
  bool feasible = false;  // mapping-feasible and within every budget
  std::vector<std::string> reasons;
};

// Cost model + objective bound to one study.
class Scorer {
 public:
  Scorer(const CostModel& model, const WorkloadSuite& suite, StudySpec spec);

  Score score(const AcceleratorConfig& config) const;
  const StudySpec& spec() const { return spec_; }
  const std::vector<std::string>& workloads() const { return workloads_; }
  const std::map<std::string, double>& baselines() const { return baselines_; }

 private:
  const CostModel* model_;
  const WorkloadSuite* suite_;
  StudySpec spec_;
  std::vector<std::string> workloads_;
  std::map<std::string, double> baselines_;
};

std::string fnv1a_hex(const std::string& bytes);

}  // namespace dse

#endif  // DSE_OBJECTIVE_HPP_
