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

#ifndef DSE_EXHAUSTIVE_HPP_
#define DSE_EXHAUSTIVE_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>

#include <nlohmann/json.hpp>

#include "dse/costmodel.hpp"
#include "dse/objective.hpp"
#include "dse/runner.hpp"

namespace dse {

struct PruneFilter {
  std::pair<double, double> total_memory_mb{4, 16};
  std::pair<double, double> total_pes{2, 16};
  std::map<std::string, std::pair<int, int>> index_ranges;  // per parameter, inclusive

  // Accepts everything.
  static PruneFilter none();
  void validate(const SearchSpace& space) const;
  static PruneFilter from_json(const nlohmann::json& j);
  static PruneFilter load(const std::filesystem::path& path);
  nlohmann::json to_json() const;
};

// global + parameter + activation + local * PEs / 1024, in MB.
double total_memory_mb(const HardwareParams& hw);

// Visits, in row-major genome order, every config that passes the filter and
// has area <= area_budget (when given). Partial assignments are cut with
// monotone bounds, so the full grid is never walked. `visit` returns false to
// stop early.
void prune_enumerate(const CostModel& model, const PruneFilter& filter,
                     std::optional<double> area_budget,
                     const std::function<bool(const AcceleratorConfig&)>& visit);

std::uint64_t count_survivors(const CostModel& model, const PruneFilter& filter,
                              std::optional<double> area_budget);

struct ExhaustiveResult {
  AcceleratorConfig best_config;
  double best_reward = 0;
  std::uint64_t n_evaluated = 0;
  std::uint64_t n_feasible = 0;
};

// Scores every survivor under the study objective (area pre-filter uses the
// spec's area budget). Ties keep the lexicographically smallest genome.
// Throws ValidationError for zero survivors or zero feasible survivors.
ExhaustiveResult run_exhaustive(const StudySpec& spec, const StudyContext& context,
                                const PruneFilter& filter,
                                const std::function<void(const TrialRecord&)>& on_eval = {});

}  // namespace dse

#endif  // DSE_EXHAUSTIVE_HPP_
