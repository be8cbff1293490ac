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

#ifndef DSE_OPTIMIZER_HPP_
#define DSE_OPTIMIZER_HPP_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "dse/rng.hpp"
#include "dse/space.hpp"
#include "dse/trial.hpp"

namespace dse {

// Stateful ask/tell strategy.
//
// ask(n) returns n distinct configurations, none of which is currently
// pending, and marks them pending. tell() moves configurations from pending
// to history and updates the strategy; telling a configuration that was never
// asked is allowed (warm starts, replays). Configurations already in history
// may be proposed again.
//
// A handle is single-owner: ask and tell must not be called concurrently.
class Optimizer {
 public:
  Optimizer(SearchSpace space, std::uint64_t seed);
  virtual ~Optimizer() = default;

  Optimizer(const Optimizer&) = delete;
  Optimizer& operator=(const Optimizer&) = delete;

  virtual std::string_view kind() const = 0;

  std::vector<AcceleratorConfig> ask(std::size_t n);
  void tell(std::span<const TrialRecord> records);
  void tell(const TrialRecord& record) { tell(std::span<const TrialRecord>(&record, 1)); }

  // Seeds the strategy with trials from another task before the study
  // starts. The default treats them as ordinary external tells.
  virtual void warm_start(std::span<const TrialRecord> seeds) { tell(seeds); }

  // Fresh instance of the same strategy with numeric hyperparameters scaled
  // by U(0.5, 2) and clamped; nullptr when the strategy has none.
  virtual std::unique_ptr<Optimizer> spawn_perturbed(Rng& rng, std::uint64_t seed) const;

  virtual nlohmann::json hyperparameters() const { return nlohmann::json::object(); }

  const SearchSpace& space() const { return space_; }
  const std::vector<TrialRecord>& history() const { return history_; }
  std::size_t pending_count() const { return pending_.size(); }
  // Forgets a pending proposal that will never be told.
  void cancel(const AcceleratorConfig& config) { pending_.erase(space_.rank(config)); }
  bool is_pending(const AcceleratorConfig& config) const {
    return pending_.contains(space_.rank(config));
  }

 protected:
  // Strategy proposals; the base class repairs collisions with pending
  // configurations and within the batch.
  virtual std::vector<AcceleratorConfig> propose(std::size_t n) = 0;
  // Called after `records` have been appended to history.
  virtual void observe(std::span<const TrialRecord> records) = 0;

  Rng& rng() { return rng_; }
  bool pending_contains(std::uint64_t rank) const { return pending_.contains(rank); }
  // Pending configurations in rank order.
  std::vector<AcceleratorConfig> pending_configs() const;

 private:
  AcceleratorConfig repair(const AcceleratorConfig& config,
                           const std::unordered_set<std::uint64_t>& taken);

  SearchSpace space_;
  Rng rng_;
  std::unordered_set<std::uint64_t> pending_;
  std::vector<TrialRecord> history_;
};

// Perturbation used by adaptive portfolios: x * U(0.5, 2) clamped to [lo, hi].
double perturb(double x, double lo, double hi, Rng& rng);

}  // namespace dse

#endif  // DSE_OPTIMIZER_HPP_
