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

#include "dse/strategy.hpp"

#include "dse/error.hpp"
#include "dse/evolution.hpp"
#include "dse/gp_bandit.hpp"
#include "dse/mbo.hpp"
#include "dse/p3bo.hpp"
#include "dse/random_search.hpp"

namespace dse {

OptimizerSpec optimizer_spec_from_json(const nlohmann::json& j) {
  OptimizerSpec s;
  if (j.is_string()) {
    s.kind = j.get<std::string>();
    return s;
  }
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
    throw ParseError("optimizer spec needs a string \"kind\"");
  s.kind = j.at("kind").get<std::string>();
  if (j.contains("params")) {
    s.params = j.at("params");
    if (!s.params.is_object()) throw ParseError("optimizer params must be an object");
  }
  return s;
}

nlohmann::json optimizer_spec_to_json(const OptimizerSpec& spec) {
  return {{"kind", spec.kind}, {"params", spec.params}};
}

std::unique_ptr<Optimizer> make_optimizer(const OptimizerSpec& spec, const SearchSpace& space,
                                          std::uint64_t seed) {
  const auto& p = spec.params;
  try {
    if (spec.kind == "random")
      return std::make_unique<RandomSearch>(space, seed, p.value("unique", false));
    if (spec.kind == "evolutionary")
      return std::make_unique<RegularizedEvolution>(space, seed, EvoParams::from_json(p));
    if (spec.kind == "mbo")
      return std::make_unique<ModelBasedOptimizer>(space, seed, MboParams::from_json(p));
    if (spec.kind == "p3bo") return std::make_unique<P3bo>(space, seed, P3boParams::from_json(p));
    if (spec.kind == "gp_bandit" || spec.kind == "vizier")
      return std::make_unique<GpBandit>(space, seed, GpBanditParams::from_json(p));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("optimizer " + spec.kind + " params: " + e.what());
  }
  throw ValidationError("unknown optimizer kind: " + spec.kind);
}

std::vector<std::string> optimizer_kinds() {
  return {"random", "evolutionary", "mbo", "p3bo", "gp_bandit", "vizier"};
}

}  // namespace dse
