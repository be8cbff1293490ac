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

#ifndef DSE_TRANSFER_HPP_
#define DSE_TRANSFER_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "dse/gp_bandit.hpp"
#include "dse/optimizer.hpp"
#include "dse/trial.hpp"

namespace dse {

// Unique feasible trials with area <= target budget and reward <= threshold,
// best first, at most `count`. Throws ValidationError when none qualify.
std::vector<TrialRecord> select_seed_trials(std::span<const TrialRecord> source_log,
                                            double target_area_budget, double reward_threshold,
                                            std::size_t count = 100);

// Evolutionary or P3BO only. Rewards must already be under the target objective.
void warm_start_population(Optimizer& optimizer, std::span<const TrialRecord> seeds);

// Fits the base level of the GP stack on at least two source records.
void warm_start_gp_stack(GpBandit& optimizer, std::span<const TrialRecord> source);

}  // namespace dse

#endif  // DSE_TRANSFER_HPP_
