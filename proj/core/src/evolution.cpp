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

#include "dse/evolution.hpp"

#include <algorithm>
#include <cmath>

#include "dse/error.hpp"

namespace dse {

void EvoParams::validate() const {
  if (population < 2) throw ValidationError("evolutionary: population must be >= 2");
  if (crossover_rate < 0 || crossover_rate > 1)
    throw ValidationError("evolutionary: crossover_rate must be in [0,1]");
  if (mutation_rate < 0 || mutation_rate > 1)
    throw ValidationError("evolutionary: mutation_rate must be in [0,1]");
  if (tournament_size < 1) throw ValidationError("evolutionary: tournament_size must be >= 1");
  if (max_age_rounds < 1) throw ValidationError("evolutionary: max_age_rounds must be >= 1");
  if (round_size < 1) throw ValidationError("evolutionary: round_size must be >= 1");
}

EvoParams EvoParams::from_json(const nlohmann::json& j) {
  EvoParams p;
  p.population = j.value("population", p.population);
  p.crossover_rate = j.value("crossover_rate", p.crossover_rate);
  p.mutation_rate = j.value("mutation_rate", p.mutation_rate);
  p.tournament_size = j.value("tournament_size", p.tournament_size);
  p.max_age_rounds = j.value("max_age_rounds", p.max_age_rounds);
  p.round_size = j.value("round_size", p.round_size);
  p.validate();
  return p;
}

nlohmann::json EvoParams::to_json() const {
  return {{"population", population},         {"crossover_rate", crossover_rate},
          {"mutation_rate", mutation_rate},   {"tournament_size", tournament_size},
          {"max_age_rounds", max_age_rounds}, {"round_size", round_size}};
}

const Member& select_parent(std::span<const Member> population, std::size_t tournament_size,
                            Rng& rng) {
  if (population.empty()) throw ValidationError("select_parent: empty population");
  const Member* best = &population[rng.below(population.size())];
  for (std::size_t i = 1; i < tournament_size; ++i) {
    const Member* cand = &population[rng.below(population.size())];
    if (cand->reward > best->reward ||
        (cand->reward == best->reward && cand->order < best->order))
      best = cand;
  }
  return *best;
}

AcceleratorConfig crossover(const AcceleratorConfig& parent_a, const AcceleratorConfig& parent_b,
                            double rate, Rng& rng) {
  if (parent_a.genome.size() != parent_b.genome.size())
    throw ValidationError("crossover: parents differ in length");
  AcceleratorConfig child = parent_a;
  for (std::size_t g = 0; g < child.genome.size(); ++g)
    if (rng.bernoulli(rate)) child.genome[g] = parent_b.genome[g];
  return child;
}

AcceleratorConfig mutate(const AcceleratorConfig& genome, double rate, const SearchSpace& space,
                         Rng& rng) {
  AcceleratorConfig out = genome;
  for (std::size_t g = 0; g < out.genome.size(); ++g)
    if (rng.bernoulli(rate)) out = space.mutate_gene(out, g, rng);
  return out;
}

void evict(std::deque<Member>& population, std::size_t k, std::int64_t max_age_rounds,
           std::int64_t current_round) {
  std::erase_if(population, [&](const Member& m) {
    return current_round - m.birth_round > max_age_rounds;
  });
  while (population.size() > k) {
    auto oldest = std::min_element(population.begin(), population.end(),
                                   [](const Member& a, const Member& b) {
                                     return a.birth_round != b.birth_round
                                                ? a.birth_round < b.birth_round
                                                : a.order < b.order;
                                   });
    population.erase(oldest);
  }
}

RegularizedEvolution::RegularizedEvolution(SearchSpace space, std::uint64_t seed, EvoParams params)
    : Optimizer(std::move(space), seed), params_(params) {
  params_.validate();
}

std::vector<AcceleratorConfig> RegularizedEvolution::propose(std::size_t n) {
  std::vector<AcceleratorConfig> out;
  out.reserve(n);
  scratch_.assign(population_.begin(), population_.end());
  std::size_t filling = population_.size() + pending_count();
  for (std::size_t i = 0; i < n; ++i) {
    if (filling < params_.population || scratch_.empty()) {
      out.push_back(space().sample_uniform(rng()));
      ++filling;
      continue;
    }
    const Member& a = select_parent(scratch_, params_.tournament_size, rng());
    const Member& b = select_parent(scratch_, params_.tournament_size, rng());
    auto child = crossover(a.config, b.config, params_.crossover_rate, rng());
    out.push_back(mutate(child, params_.mutation_rate, space(), rng()));
  }
  return out;
}

void RegularizedEvolution::observe(std::span<const TrialRecord> records) {
  for (const auto& r : records) {
    Member m{r.config, r.reward, 0, round_};
    if (seeding_) {
      m.order = next_seed_order_++;
    } else {
      m.order = static_cast<std::int64_t>(r.trial_index);
      ++told_;
      round_ = static_cast<std::int64_t>(told_ / params_.round_size);
    }
    population_.push_back(std::move(m));
    evict(population_, params_.population, params_.max_age_rounds, round_);
  }
}

void RegularizedEvolution::warm_start(std::span<const TrialRecord> seeds) {
  std::vector<TrialRecord> top(seeds.begin(), seeds.end());
  std::stable_sort(top.begin(), top.end(),
                   [](const TrialRecord& a, const TrialRecord& b) { return a.reward > b.reward; });
  if (top.size() > params_.population) top.resize(params_.population);
  seeding_ = true;
  next_seed_order_ = -static_cast<std::int64_t>(top.size());
  tell(top);
  seeding_ = false;
}

std::unique_ptr<Optimizer> RegularizedEvolution::spawn_perturbed(Rng& rng,
                                                                 std::uint64_t seed) const {
  EvoParams p = params_;
  p.crossover_rate = perturb(p.crossover_rate, 0.0, 1.0, rng);
  p.mutation_rate = perturb(p.mutation_rate, 0.0, 1.0, rng);
  p.tournament_size = static_cast<std::size_t>(std::lround(
      perturb(static_cast<double>(p.tournament_size), 1.0, static_cast<double>(p.population), rng)));
  return std::make_unique<RegularizedEvolution>(space(), seed, p);
}

}  // namespace dse
