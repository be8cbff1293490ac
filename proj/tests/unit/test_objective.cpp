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

#include <cmath>

#include "doctest.h"
#include "dse/error.hpp"
#include "dse/objective.hpp"

using namespace dse;

namespace {

Evaluation feasible_eval(double area, std::map<std::string, double> lat) {
  Evaluation e;
  e.area_mm2 = area;
  e.latency_s = std::move(lat);
  e.feasible = true;
  return e;
}

}  // namespace

TEST_CASE("throughput per area is 1/(latency*area)") {
  const auto e = feasible_eval(2.0, {{"a", 0.5}, {"b", 0.25}});
  CHECK(reward_throughput_per_area(e, std::string("a")) == doctest::Approx(1.0));
  CHECK(reward_throughput_per_area(e, std::string("b")) == doctest::Approx(2.0));
  // geometric mean of 1 and 2
  CHECK(reward_throughput_per_area(e, std::vector<std::string>{"a", "b"}) ==
        doctest::Approx(std::sqrt(2.0)));
  Evaluation bad = e;
  bad.feasible = false;
  CHECK_THROWS_AS(reward_throughput_per_area(bad, std::string("a")), ValidationError);
}

TEST_CASE("geomean speedup against baselines") {
  const auto e = feasible_eval(1.0, {{"a", 1.0}, {"b", 4.0}, {"c", 2.0}});
  // speedups 2, 0.5, 4 -> cube root of 4
  const std::map<std::string, double> base{{"a", 2.0}, {"b", 2.0}, {"c", 8.0}};
  CHECK(reward_geomean_speedup(e, base) == doctest::Approx(std::cbrt(4.0)));
  CHECK_THROWS_AS(reward_geomean_speedup(e, {{"a", 1.0}}), ValidationError);
}

TEST_CASE("budgets zero the reward and add reasons") {
  StudySpec spec;
  spec.area_budget_mm2 = 5.0;
  spec.latency_budget_s = {{"a", 0.5}};
  auto e = feasible_eval(4.0, {{"a", 0.4}});
  CHECK(constraint_violations(e, spec).empty());
  CHECK(apply_constraints(e, spec, 3.0) == 3.0);
  e.area_mm2 = 5.5;
  CHECK(constraint_violations(e, spec) == std::vector<std::string>{"area_budget"});
  CHECK(apply_constraints(e, spec, 3.0) == 0.0);
  e.area_mm2 = 5.0;  // at the budget is allowed
  e.latency_s["a"] = 0.6;
  CHECK(constraint_violations(e, spec) == std::vector<std::string>{"latency_budget"});
  Evaluation infeasible;
  infeasible.area_mm2 = 9;
  infeasible.infeasibility_reasons = {"global_memory"};
  CHECK(constraint_violations(infeasible, spec) ==
        std::vector<std::string>{"global_memory", "area_budget"});
}

TEST_CASE("scorer ties evaluation, budgets and objective together") {
  const CostModel model(SearchSpace::default_space(), Calibration{});
  const auto suite = WorkloadSuite::default_suite();
  StudySpec spec;
  const Scorer scorer(model, suite, spec);
  const auto ref = model.space().from_values(reference_config_values());
  const Score s = scorer.score(ref);
  CHECK(s.feasible);
  CHECK(s.reward == doctest::Approx(1.0).epsilon(1e-12));  // the reference is its own baseline

  spec.area_budget_mm2 = 4.8;  // reference is 6.18 mm^2
  const Scorer tight(model, suite, spec);
  const Score t = tight.score(ref);
  CHECK_FALSE(t.feasible);
  CHECK(t.reward == 0.0);
  CHECK(t.reasons == std::vector<std::string>{"area_budget"});

  const Score small = scorer.score(model.space().min_config());
  CHECK_FALSE(small.feasible);
  CHECK(small.reward == 0.0);
  CHECK_FALSE(small.reasons.empty());

  spec.workloads = {"nope"};
  CHECK_THROWS(Scorer(model, suite, spec));
}

TEST_CASE("single-workload throughput study") {
  const CostModel model(SearchSpace::default_space(), Calibration{});
  const auto suite = WorkloadSuite::default_suite();
  StudySpec spec;
  spec.objective = ObjectiveKind::kThroughputPerArea;
  spec.workloads = {"M7"};
  const Scorer scorer(model, suite, spec);
  const auto ref = model.space().from_values(reference_config_values());
  const double expected = 1.0 / (model.latency(ref, suite.at("M7")) * model.area(ref));
  CHECK(scorer.score(ref).reward == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("spec parsing") {
  const auto s = StudySpec::from_json(nlohmann::json::parse(R"({
    "name": "x", "objective": "throughput_per_area", "workloads": ["M7"],
    "area_budget_mm2": 4.8, "trial_budget": 64, "n_seeds": 2, "first_seed": 3,
    "max_concurrent": 4, "optimizer": {"kind": "evolutionary", "params": {"population": 10}}})"));
  CHECK(s.objective == ObjectiveKind::kThroughputPerArea);
  CHECK(*s.area_budget_mm2 == 4.8);
  CHECK(s.optimizer.params["population"] == 10);
  const auto back = StudySpec::from_json(s.to_json());
  CHECK(back.hash() == s.hash());
  CHECK(StudySpec::from_json(nlohmann::json::parse(R"({"optimizer": "random"})")).optimizer.kind ==
        "random");

  CHECK_THROWS_AS(StudySpec::from_json(nlohmann::json::parse(R"({"bogus": 1})")), ParseError);
  CHECK_THROWS_AS(StudySpec::from_json(nlohmann::json::parse(R"({"trial_budget": 0})")), ParseError);
  CHECK_THROWS_AS(StudySpec::from_json(nlohmann::json::parse(R"({"objective": "speed"})")), ParseError);
  CHECK_THROWS_AS(StudySpec::from_json(nlohmann::json::parse(R"({"area_budget_mm2": -1})")), ParseError);
  CHECK_THROWS_AS(StudySpec::from_json(nlohmann::json::parse(R"({"workloads": ["a", "a"]})")), ParseError);
  CHECK_THROWS_AS(StudySpec::from_json(nlohmann::json::parse("[1]")), ParseError);
  CHECK_THROWS_AS(StudySpec::load("/nonexistent/spec.json"), NotFoundError);
}

TEST_CASE("spec hash changes with content") {
  StudySpec a, b;
  CHECK(a.hash() == b.hash());
  b.trial_budget = 100;
  CHECK(a.hash() != b.hash());
  CHECK(a.hash().size() == 16);
  // FNV-1a test vectors
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
}
