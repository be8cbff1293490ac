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

#ifndef DSE_GP_BANDIT_HPP_
#define DSE_GP_BANDIT_HPP_

#include <cstddef>
#include <optional>
#include <unordered_map>
#include <vector>

#include "dse/gaussian_process.hpp"
#include "dse/optimizer.hpp"

namespace dse {

struct GpBanditParams {
  double xi = 0.01;              // EI exploration margin
  std::size_t restarts = 8;      // hill-climbing restarts per proposal
  std::size_t incumbent_starts = 2;  // extra climbs from the best observed configs
  std::size_t n_init = 10;       // uniform proposals before the first fit
  std::size_t max_points = 128;  // training-set cap (best half + most recent)
  std::size_t refit_every = 16;  // tells between hyperparameter searches

  void validate() const;
  static GpBanditParams from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

// Bayesian optimization: GP regressor on the one-hot (+) numeric encoding,
// expected improvement maximized by hill climbing. Pending trials are imputed
// at the current posterior mean (constant liar). Transfer uses a two-level GP
// stack with the source trials as the base.
class GpBandit : public Optimizer {
 public:
  GpBandit(SearchSpace space, std::uint64_t seed, GpBanditParams params = {});

  std::string_view kind() const override { return "gp_bandit"; }
  nlohmann::json hyperparameters() const override { return params_.to_json(); }
  std::unique_ptr<Optimizer> spawn_perturbed(Rng& rng, std::uint64_t seed) const override;

  // Fits the base GP of the stack on source trials (config -> reward).
  void warm_start(std::span<const TrialRecord> seeds) override;

  // Posterior under the current data (refits if needed, no liars).
  GpPrediction predict(const AcceleratorConfig& config);
  const StackedGaussianProcess& model() const { return model_; }
  const GpBanditParams& params() const { return params_; }

  // Squared distance between the one-hot (+) numeric encodings.
  double sq_distance(const AcceleratorConfig& a, const AcceleratorConfig& b) const;

 protected:
  std::vector<AcceleratorConfig> propose(std::size_t n) override;
  void observe(std::span<const TrialRecord> records) override;

 private:
  void fit_target(const std::vector<AcceleratorConfig>& extra_x, const std::vector<double>& extra_y);
  Eigen::VectorXd sq_to(const std::vector<AcceleratorConfig>& set, const AcceleratorConfig& c) const;
  Eigen::MatrixXd pairwise(const std::vector<AcceleratorConfig>& set) const;
  GpPrediction posterior(const AcceleratorConfig& c) const;
  std::vector<std::size_t> training_subset() const;
  std::vector<AcceleratorConfig> incumbents() const;
  AcceleratorConfig fresh_sample();

  GpBanditParams params_;
  std::vector<std::vector<double>> gene_sq_;  // per gene, count x count

  // Unique observations in first-seen order.
  std::vector<AcceleratorConfig> data_x_;
  std::vector<double> data_y_;
  std::vector<std::size_t> data_seen_;
  std::unordered_map<std::uint64_t, std::size_t> data_index_;
  std::size_t tell_counter_ = 0;
  std::size_t tells_since_refit_ = 0;

  std::vector<AcceleratorConfig> base_x_;
  std::vector<double> base_y_;
  double base_best_ = 0;
  std::vector<AcceleratorConfig> fit_x_;  // target training inputs incl. liars
  StackedGaussianProcess model_;
  std::optional<GpHyper> hyper_;
  bool dirty_ = true;
};

}  // namespace dse

#endif  // DSE_GP_BANDIT_HPP_
