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

#ifndef DSE_MBO_HPP_
#define DSE_MBO_HPP_

#include <cstddef>
#include <optional>
#include <unordered_map>
#include <vector>

#include "dse/optimizer.hpp"
#include "dse/regressors.hpp"

namespace dse {

struct MboParams {
  double beta = 1.0;
  std::size_t min_history = 10;
  std::size_t refit_every = 16;   // tells between ensemble refits
  std::size_t max_train = 512;    // unique points kept for fitting (best half + most recent)
  std::size_t inner_population = 50;
  std::size_t inner_generations = 20;
  std::size_t inner_seeds = 10;   // top observed configs seeding the inner search
  ModelSelectionOptions selection;

  void validate() const;
  static MboParams from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

// Model-based optimization: an ensemble of regressors selected by CV defines
// mean + beta * stddev, maximized by a small inner evolutionary search.
class ModelBasedOptimizer : public Optimizer {
 public:
  ModelBasedOptimizer(SearchSpace space, std::uint64_t seed, MboParams params = {});

  std::string_view kind() const override { return "mbo"; }
  nlohmann::json hyperparameters() const override { return params_.to_json(); }
  std::unique_ptr<Optimizer> spawn_perturbed(Rng& rng, std::uint64_t seed) const override;

  const MboParams& params() const { return params_; }
  const std::optional<Ensemble>& ensemble() const { return ensemble_; }

 protected:
  std::vector<AcceleratorConfig> propose(std::size_t n) override;
  void observe(std::span<const TrialRecord> records) override;

 private:
  void refit();
  double acquisition(const AcceleratorConfig& config);

  MboParams params_;
  std::vector<AcceleratorConfig> data_x_;
  std::vector<double> data_y_;
  std::vector<std::size_t> data_seen_;
  std::unordered_map<std::uint64_t, std::size_t> data_index_;
  std::size_t tell_counter_ = 0;
  std::size_t tells_since_refit_ = 0;
  std::optional<Ensemble> ensemble_;
  std::unordered_map<std::uint64_t, double> acq_cache_;
};

}  // namespace dse

#endif  // DSE_MBO_HPP_
