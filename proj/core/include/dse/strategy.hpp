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

#ifndef DSE_STRATEGY_HPP_
#define DSE_STRATEGY_HPP_

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "dse/objective.hpp"
#include "dse/optimizer.hpp"

namespace dse {

// Accepts "kind" or {"kind": ..., "params": {...}}.
OptimizerSpec optimizer_spec_from_json(const nlohmann::json& j);
nlohmann::json optimizer_spec_to_json(const OptimizerSpec& spec);

// Kinds: random, evolutionary, mbo, p3bo, gp_bandit (alias vizier).
std::unique_ptr<Optimizer> make_optimizer(const OptimizerSpec& spec, const SearchSpace& space,
                                          std::uint64_t seed);
std::vector<std::string> optimizer_kinds();

}  // namespace dse

#endif  // DSE_STRATEGY_HPP_
