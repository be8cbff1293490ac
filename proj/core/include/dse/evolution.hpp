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

#ifndef DSE_EVOLUTION_HPP_
#define DSE_EVOLUTION_HPP_

#include <cstddef>
#include <cstdint>
#include <deque>
#include <span>

#include "dse/optimizer.hpp"

namespace dse {

struct EvoParams {
  std::size_t population = 100;     // K
  double crossover_rate = 0.1;      // gamma
  double mutation_rate = 0.01;      // mu
  std::size_t tournament_size = 5;
  std::int64_t max_age_rounds = 40;
  std::size_t round_size = 16;      // tells per optimization round

  void validate() const;
  static EvoParams from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct Member {
  AcceleratorConfig config;
  double reward = 0;
  std::int64_t order = 0;        // trial index; warm-start seeds are negative
  std::int64_t birth_round = 0;
};

// Tournament of `tournament_size` uniform draws with replacement; the highest
// reward wins, ties go to the lower order (older member).
const Member& select_parent(std::span<const Member> population, std::size_t tournament_size,
                            Rng& rng);
// Per gene: parent_b's index with probability `rate`, else parent_a's.
AcceleratorConfig crossover(const AcceleratorConfig& parent_a, const AcceleratorConfig& parent_b,
                            double rate, Rng& rng);
// Each gene independently resampled (to a different value) with probability `rate`.
AcceleratorConfig mutate(const AcceleratorConfig& genome, double rate, const SearchSpace& space,
                         Rng& rng);
// Drops members older than max_age_rounds, then the oldest until size <= K.
void evict(std::deque<Member>& population, std::size_t k, std::int64_t max_age_rounds,
           std::int64_t current_round);

// Regularized ("aging") evolution: the first K proposals are uniform, then
// each child comes from two tournament parents via crossover and mutation.
class RegularizedEvolution : public Optimizer {
 public:
  RegularizedEvolution(SearchSpace space, std::uint64_t seed, EvoParams params = {});

  std::string_view kind() const override { return "evolutionary"; }
  nlohmann::json hyperparameters() const override { return params_.to_json(); }
  std::unique_ptr<Optimizer> spawn_perturbed(Rng& rng, std::uint64_t seed) const override;

  // Initializes the population from the seeds, keeping the K best by reward.
  void warm_start(std::span<const TrialRecord> seeds) override;

  const std::deque<Member>& population() const { return population_; }
  const EvoParams& params() const { return params_; }
  std::int64_t round() const { return round_; }

 protected:
  std::vector<AcceleratorConfig> propose(std::size_t n) override;
  void observe(std::span<const TrialRecord> records) override;

 private:
  EvoParams params_;
  std::deque<Member> population_;
  std::vector<Member> scratch_;
  std::size_t told_ = 0;
  std::int64_t round_ = 0;
  bool seeding_ = false;
  std::int64_t next_seed_order_ = 0;
};

}  // namespace dse

#endif  // DSE_EVOLUTION_HPP_
