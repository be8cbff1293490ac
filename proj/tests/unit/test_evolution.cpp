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
#include <deque>
#include <map>
#include <set>

#include "doctest.h"
#include "dse/error.hpp"
#include "dse/evolution.hpp"
#include "dse/random_search.hpp"
#include "dse/strategy.hpp"

using namespace dse;

namespace {

TrialRecord record(const AcceleratorConfig& c, double reward, std::size_t index) {
  TrialRecord r;
  r.config = c;
  r.reward = reward;
  r.feasible = reward > 0;
  r.trial_index = index;
  return r;
}

}  // namespace

TEST_CASE("tournament winner frequencies match the order-statistic law") {
  // With replacement, P(rank r wins) = ((N-r)/N)^t - ((N-r-1)/N)^t, rank 0 = best.
  const std::size_t n = 10, t = 5, draws = 200000;
  std::vector<Member> pop(n);
  for (std::size_t i = 0; i < n; ++i) {
    pop[i].reward = static_cast<double>(i);
    pop[i].order = static_cast<std::int64_t>(i);
  }
  Rng rng(11);
  std::vector<double> freq(n, 0);
  for (std::size_t d = 0; d < draws; ++d) freq[static_cast<std::size_t>(select_parent(pop, t, rng).reward)]++;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = static_cast<double>(n - 1 - i);
    const double expected = std::pow((n - r) / n, t) - std::pow((n - r - 1) / n, t);
    CHECK(std::abs(freq[i] / draws - expected) < 0.005);
  }
}

TEST_CASE("tournament of size one is uniform and ties go to the earlier trial") {
  std::vector<Member> pop(4);
  for (std::size_t i = 0; i < 4; ++i) pop[i].order = static_cast<std::int64_t>(10 - i);
  Rng rng(5);
  std::vector<int> hits(4, 0);
  for (int d = 0; d < 40000; ++d) hits[static_cast<std::size_t>(10 - select_parent(pop, 1, rng).order)]++;
  for (int h : hits) CHECK(std::abs(h / 40000.0 - 0.25) < 0.01);
  // Equal rewards: the lowest order wins whenever it is drawn, and a big
  // tournament almost always draws it.
  CHECK(select_parent(pop, 200, rng).order == 7);
  CHECK_THROWS_AS(select_parent(std::span<const Member>(), 3, rng), ValidationError);
}

TEST_CASE("crossover and mutation rates are per gene") {
  const auto space = SearchSpace::default_space();
  Rng rng(21);
  const auto a = space.min_config();
  const auto b = space.max_config();  // differs from a in every gene
  std::size_t from_b = 0, changed = 0, genes = 0;
  for (int i = 0; i < 20000; ++i) {
    const auto c = crossover(a, b, 0.3, rng);
    const auto m = mutate(a, 0.2, space, rng);
    for (std::size_t g = 0; g < a.genome.size(); ++g) {
      from_b += c.genome[g] == b.genome[g];
      changed += m.genome[g] != a.genome[g];
      ++genes;
    }
  }
  CHECK(std::abs(static_cast<double>(from_b) / genes - 0.3) < 0.01);
  CHECK(std::abs(static_cast<double>(changed) / genes - 0.2) < 0.01);
  CHECK_THROWS_AS(crossover(a, AcceleratorConfig{{0}}, 0.5, rng), ValidationError);
}

TEST_CASE("eviction removes the aged first, then the oldest") {
  std::deque<Member> pop;
  for (int i = 0; i < 6; ++i) pop.push_back(Member{{{i}}, 1.0, i, i / 2});
  evict(pop, 4, 100, 3);
  REQUIRE(pop.size() == 4);
  CHECK(pop.front().order == 2);  // births 0,0 dropped
  evict(pop, 10, 1, 3);           // age > 1 goes: births 1
  REQUIRE(pop.size() == 2);
  CHECK(pop.front().order == 4);
}

TEST_CASE("evolution fills the population uniformly, then breeds") {
  const auto space = SearchSpace::default_space();
  EvoParams p;
  p.population = 20;
  RegularizedEvolution evo(space, 3, p);
  std::size_t index = 0;
  for (int round = 0; round < 10; ++round) {
    const auto batch = evo.ask(8);
    std::set<AcceleratorConfig> distinct(batch.begin(), batch.end());
    CHECK(distinct.size() == batch.size());
    std::vector<TrialRecord> recs;
    for (const auto& c : batch) recs.push_back(record(c, 1.0 + 0.01 * index, index++));
    evo.tell(recs);
    CHECK(evo.population().size() <= p.population);
    CHECK(evo.pending_count() == 0);
  }
  CHECK(evo.round() == 80 / 16);
  CHECK(evo.history().size() == 80);
}

TEST_CASE("evolution ages members out by round") {
  const auto space = SearchSpace::default_space();
  EvoParams p;
  p.population = 1000;
  p.max_age_rounds = 2;
  p.round_size = 4;
  RegularizedEvolution evo(space, 1, p);
  Rng rng(2);
  for (std::size_t i = 0; i < 40; ++i) evo.tell(record(space.sample_uniform(rng), 1.0, i));
  // round = 10; members born before round 8 are gone
  for (const auto& m : evo.population()) CHECK(evo.round() - m.birth_round <= 2);
  CHECK(evo.population().size() < 40);
}

TEST_CASE("warm start keeps the best seeds with negative order") {
  const auto space = SearchSpace::default_space();
  EvoParams p;
  p.population = 3;
  RegularizedEvolution evo(space, 1, p);
  Rng rng(4);
  std::vector<TrialRecord> seeds;
  for (int i = 0; i < 5; ++i) seeds.push_back(record(space.sample_uniform(rng), (i + 1) / 10.0, 0));
  evo.warm_start(seeds);
  REQUIRE(evo.population().size() == 3);
  std::set<double> rewards;
  for (const auto& m : evo.population()) {
    CHECK(m.order < 0);
    rewards.insert(m.reward);
  }
  CHECK(rewards == std::set<double>{3 / 10.0, 4 / 10.0, 5 / 10.0});
  CHECK(evo.round() == 0);
}

TEST_CASE("evo params validation and json") {
  EvoParams p;
  p.crossover_rate = 1.5;
  CHECK_THROWS_AS(p.validate(), ValidationError);
  const auto q = EvoParams::from_json({{"population", 7}, {"mutation_rate", 0.5}});
  CHECK(q.population == 7);
  CHECK(q.mutation_rate == 0.5);
  CHECK(EvoParams::from_json(q.to_json()).to_json() == q.to_json());
}

// ---------------------------------------------------------------------------

TEST_CASE("ask never repeats a pending configuration") {
  const SearchSpace tiny({{"a", {1, 2}}, {"b", {1, 2, 3}}});
  RandomSearch rs(tiny, 9);
  const auto first = rs.ask(4);
  const auto second = rs.ask(2);
  std::set<AcceleratorConfig> all(first.begin(), first.end());
  all.insert(second.begin(), second.end());
  CHECK(all.size() == 6);
  CHECK_THROWS_AS(rs.ask(1), ValidationError);
  rs.tell(record(first[0], 1.0, 0));
  CHECK(rs.pending_count() == 5);
  CHECK(rs.ask(1).size() == 1);
}

TEST_CASE("unique random search covers the space without repeats") {
  const SearchSpace tiny({{"a", {1, 2, 3}}, {"b", {1, 2, 3, 4}}});
  RandomSearch rs(tiny, 1, true);
  std::set<AcceleratorConfig> seen;
  for (std::size_t i = 0; i < 12; ++i) {
    const auto c = rs.ask(1).front();
    CHECK(seen.insert(c).second);
    rs.tell(record(c, 1.0, i));
  }
}

TEST_CASE("strategy registry") {
  const auto space = SearchSpace::default_space();
  for (const auto& kind : optimizer_kinds()) {
    auto opt = make_optimizer({kind, nlohmann::json::object()}, space, 1);
    REQUIRE(opt != nullptr);
    CHECK(opt->ask(3).size() == 3);
  }
  CHECK(make_optimizer({"vizier", nlohmann::json::object()}, space, 1)->kind() == "gp_bandit");
  CHECK_THROWS(make_optimizer({"annealing", nlohmann::json::object()}, space, 1));
  CHECK_THROWS_AS(make_optimizer({"evolutionary", {{"population", "x"}}}, space, 1), ParseError);
}
