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

#include "dse/transfer.hpp"

#include <algorithm>
#include <unordered_set>

#include "dse/error.hpp"

namespace dse {

std::vector<TrialRecord> select_seed_trials(std::span<const TrialRecord> source_log,
                                            double target_area_budget, double reward_threshold,
                                            std::size_t count) {
  if (source_log.empty()) throw ValidationError("select_seed_trials: empty source log");
  std::vector<TrialRecord> picked;
  std::unordered_set<AcceleratorConfig, ConfigHash> seen;
  for (const auto& r : source_log) {
    if (!r.feasible || r.reward <= 0) continue;
    if (r.area_mm2 > target_area_budget || r.reward > reward_threshold) continue;
    if (seen.insert(r.config).second) picked.push_back(r);
  }
  if (picked.empty())
    throw ValidationError("no transferable trials: none of " + std::to_string(source_log.size()) +
                          " source trials is feasible with area <= " +
                          std::to_string(target_area_budget) + " and reward <= " +
                          std::to_string(reward_threshold));
  std::stable_sort(picked.begin(), picked.end(),
                   [](const TrialRecord& a, const TrialRecord& b) { return a.reward > b.reward; });
  if (picked.size() > count) picked.resize(count);
  return picked;
}

void warm_start_population(Optimizer& optimizer, std::span<const TrialRecord> seeds) {
  if (optimizer.kind() != "evolutionary" && optimizer.kind() != "p3bo")
    throw ValidationError("warm_start_population: unsupported strategy " +
                          std::string(optimizer.kind()));
  if (seeds.empty()) throw ValidationError("warm_start_population: no seeds");
  optimizer.warm_start(seeds);
}

void warm_start_gp_stack(GpBandit& optimizer, std::span<const TrialRecord> source) {
  if (source.size() < 2) throw ValidationError("warm_start_gp_stack: need at least 2 source records");
  optimizer.warm_start(source);
}

}  // namespace dse
