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

#ifndef DSE_REGRESSORS_HPP_
#define DSE_REGRESSORS_HPP_

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "dse/rng.hpp"
#include "dse/space.hpp"

namespace dse {

struct Dataset {
  std::vector<AcceleratorConfig> x;
  std::vector<double> y;
};

class Regressor {
 public:
  virtual ~Regressor() = default;
  virtual void fit(const Dataset& data, Rng& rng) = 0;
  virtual double predict(const AcceleratorConfig& config) const = 0;
  virtual std::string describe() const = 0;
};

// Mean of the k nearest training points in the numeric encoding (ties by
// training order).
class KnnRegressor : public Regressor {
 public:
  KnnRegressor(const SearchSpace& space, std::size_t k);
  void fit(const Dataset& data, Rng& rng) override;
  double predict(const AcceleratorConfig& config) const override;
  std::string describe() const override { return "knn(k=" + std::to_string(k_) + ")"; }

 private:
  std::vector<std::vector<double>> coord_;  // per gene: index -> numeric coordinate
  std::size_t k_;
  std::vector<AcceleratorConfig> x_;
  std::vector<double> y_;
};

// Ridge regression on one-hot features with an unpenalized intercept.
class RidgeRegressor : public Regressor {
 public:
  RidgeRegressor(const SearchSpace& space, double penalty);
  void fit(const Dataset& data, Rng& rng) override;
  double predict(const AcceleratorConfig& config) const override;
  std::string describe() const override;

 private:
  std::vector<std::size_t> offset_;
  std::size_t width_;
  double penalty_;
  double intercept_ = 0;
  std::vector<double> weights_;
};

// Bootstrap-aggregated regression trees of depth <= max_depth, split on
// genome-index thresholds.
class BaggedTrees : public Regressor {
 public:
  BaggedTrees(const SearchSpace& space, std::size_t n_trees, std::size_t max_depth = 3);
  void fit(const Dataset& data, Rng& rng) override;
  double predict(const AcceleratorConfig& config) const override;
  std::string describe() const override { return "trees(n=" + std::to_string(n_trees_) + ")"; }

 private:
  struct Node {
    int gene = -1;  // -1 for a leaf
    int threshold = 0;  // left when index <= threshold
    int left = -1;
    int right = -1;
    double value = 0;
  };
  using Tree = std::vector<Node>;

  int grow(Tree& tree, const Dataset& data, std::vector<std::size_t>& rows, std::size_t depth);

  std::vector<std::size_t> counts_;
  std::size_t n_trees_;
  std::size_t max_depth_;
  std::vector<Tree> trees_;
};

// Pooled out-of-fold R^2 under k-fold cross-validation; 0 when y has no
// variance.
double cv_r2(const std::function<std::unique_ptr<Regressor>()>& make, const Dataset& data,
             std::size_t folds, Rng& rng);

struct Ensemble {
  std::vector<std::unique_ptr<Regressor>> members;
  std::vector<double> cv_scores;
  bool fallback = false;  // no candidate met the threshold; best single kept
};

struct ModelSelectionOptions {
  std::size_t folds = 5;
  std::size_t random_draws = 16;  // per candidate family
  double threshold = 0.0;         // minimum CV R^2
};

// Candidate pool: kNN (k in {3,5,7}), ridge (penalty in {0.1,1,10}), bagged
// trees (25 or 50). Each family is tuned by randomized search scored with CV
// R^2; families at or above the threshold are refit on all data and
// ensembled.
Ensemble select_models(const SearchSpace& space, const Dataset& data, Rng& rng,
                       const ModelSelectionOptions& options = {});

// Mean of member predictions + beta * their population standard deviation.
double mbo_acquisition(const Ensemble& ensemble, const AcceleratorConfig& config, double beta);

}  // namespace dse

#endif  // DSE_REGRESSORS_HPP_
