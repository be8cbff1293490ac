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

#ifndef DSE_P3BO_HPP_
#define DSE_P3BO_HPP_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <unordered_map>
#include <vector>

#include "dse/objective.hpp"
#include "dse/optimizer.hpp"

namespace dse {

struct CreditEvent {
  std::size_t member = 0;
  double improvement = 0;  // max(0, reward - best before the tell)
  std::int64_t round = 0;
};

// credit_i = sum over member i's events of decay^(current_round - round) * improvement.
std::vector<double> p3bo_credits(std::span<const CreditEvent> events, std::size_t n_members,
                                 std::int64_t current_round, double decay);
// softmax(credit / T) with T = max credit, or 1 when every credit is zero.
std::vector<double> p3bo_weights(std::span<const double> credits);
// Assigns each of n slots to a member drawn by weight; returns per-member counts.
std::vector<std::size_t> allocate_slots(std::span<const double> weights, std::size_t n, Rng& rng);

struct P3boParams {
  std::vector<OptimizerSpec> portfolio;  // empty means {evolutionary, mbo}
  double decay = 0.9;
  std::size_t round_size = 16;
  bool adaptive = true;
  std::int64_t adapt_every_rounds = 10;

  void validate() const;
  static P3boParams from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

class P3bo : public Optimizer {
 public:
  P3bo(SearchSpace space, std::uint64_t seed, P3boParams params = {});

  std::string_view kind() const override { return "p3bo"; }
  nlohmann::json hyperparameters() const override;
  void warm_start(std::span<const TrialRecord> seeds) override;

  std::size_t size() const { return members_.size(); }
  const Optimizer& member(std::size_t i) const { return *members_[i]; }
  std::vector<double> weights() const;
  std::vector<double> credits() const;
  std::int64_t round() const { return round_; }
  const std::vector<CreditEvent>& events() const { return events_; }

  // Replaces the lowest-credit member by a perturbed clone of the
  // highest-credit one. No-op unless the current round is a positive
  // multiple of adapt_every_rounds that has not been handled yet.
  bool adapt();

 protected:
  std::vector<AcceleratorConfig> propose(std::size_t n) override;
  void observe(std::span<const TrialRecord> records) override;

 private:
  P3boParams params_;
  std::vector<std::unique_ptr<Optimizer>> members_;
  std::vector<CreditEvent> events_;
  std::unordered_map<std::uint64_t, std::size_t> owner_;
  std::vector<TrialRecord> shared_;
  bool have_best_ = false;
  double best_ = 0;
  std::size_t told_ = 0;
  std::int64_t round_ = 0;
  std::int64_t last_adapt_ = 0;
};

}  // namespace dse

#endif  // DSE_P3BO_HPP_
