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

#include "dse/regressors.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <utility>

#include "dse/error.hpp"

namespace dse {

namespace {

double mean_of(const std::vector<double>& y) {
  if (y.empty()) return 0;
  return std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
}

void check_dataset(const Dataset& data) {
  if (data.x.size() != data.y.size()) throw ValidationError("dataset x/y size mismatch");
  if (data.x.empty()) throw ValidationError("cannot fit a regressor on an empty dataset");
}

}  // namespace

KnnRegressor::KnnRegressor(const SearchSpace& space, std::size_t k) : k_(k) {
  if (k == 0) throw ValidationError("knn: k must be positive");
  for (const ParamSpec& p : space.params()) {
    std::vector<double> c(p.size(), 0.0);
    for (std::size_t i = 0; i < p.size(); ++i)
      c[i] = p.size() > 1 ? static_cast<double>(i) / static_cast<double>(p.size() - 1) : 0.0;
    coord_.push_back(std::move(c));
  }
}

void KnnRegressor::fit(const Dataset& data, Rng&) {
  check_dataset(data);
  x_ = data.x;
  y_ = data.y;
}

double KnnRegressor::predict(const AcceleratorConfig& config) const {
  std::vector<std::pair<double, std::size_t>> d(x_.size());
  for (std::size_t r = 0; r < x_.size(); ++r) {
    double s = 0;
    for (std::size_t g = 0; g < coord_.size(); ++g) {
      const double diff = coord_[g][static_cast<std::size_t>(config.genome[g])] -
                          coord_[g][static_cast<std::size_t>(x_[r].genome[g])];
      s += diff * diff;
    }
    d[r] = {s, r};
  }
  const std::size_t k = std::min(k_, d.size());
  std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k), d.end());
  double sum = 0;
  for (std::size_t i = 0; i < k; ++i) sum += y_[d[i].second];
  return sum / static_cast<double>(k);
}

RidgeRegressor::RidgeRegressor(const SearchSpace& space, double penalty)
    : width_(space.onehot_width()), penalty_(penalty) {
  if (!(penalty >= 0)) throw ValidationError("ridge: penalty must be >= 0");
  std::size_t off = 0;
  for (const ParamSpec& p : space.params()) {
    offset_.push_back(off);
    off += p.size();
  }
}

std::string RidgeRegressor::describe() const {
  return "ridge(lambda=" + std::to_string(penalty_) + ")";
}

void RidgeRegressor::fit(const Dataset& data, Rng&) {
  check_dataset(data);
  const std::size_t n = data.x.size();
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                            static_cast<Eigen::Index>(width_));
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t g = 0; g < offset_.size(); ++g)
      x(static_cast<Eigen::Index>(r),
        static_cast<Eigen::Index>(offset_[g] + static_cast<std::size_t>(data.x[r].genome[g]))) = 1;
  Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(data.y.data(), static_cast<Eigen::Index>(n));
  const Eigen::RowVectorXd x_mean = x.colwise().mean();
  const double y_mean = y.mean();
  x.rowwise() -= x_mean;
  y.array() -= y_mean;
  Eigen::MatrixXd gram = x.transpose() * x;
  // Keeps the system definite even for penalty 0 with collinear one-hot blocks.
  gram.diagonal().array() += std::max(penalty_, 1e-9);
  const Eigen::VectorXd w = gram.ldlt().solve(x.transpose() * y);
  weights_.assign(w.data(), w.data() + w.size());
  intercept_ = y_mean - x_mean.dot(w);
}

double RidgeRegressor::predict(const AcceleratorConfig& config) const {
  double s = intercept_;
  for (std::size_t g = 0; g < offset_.size(); ++g)
    s += weights_[offset_[g] + static_cast<std::size_t>(config.genome[g])];
  return s;
}

BaggedTrees::BaggedTrees(const SearchSpace& space, std::size_t n_trees, std::size_t max_depth)
    : n_trees_(n_trees), max_depth_(max_depth) {
  if (n_trees == 0) throw ValidationError("trees: n_trees must be positive");
  for (const ParamSpec& p : space.params()) counts_.push_back(p.size());
}

int BaggedTrees::grow(Tree& tree, const Dataset& data, std::vector<std::size_t>& rows,
                      std::size_t depth) {
  const int id = static_cast<int>(tree.size());
  tree.emplace_back();
  double sum = 0;
  for (std::size_t r : rows) sum += data.y[r];
  const double total_n = static_cast<double>(rows.size());
  tree[static_cast<std::size_t>(id)].value = sum / total_n;
  if (depth >= max_depth_ || rows.size() < 2) return id;

  // Maximizing sum_L^2/n_L + sum_R^2/n_R minimizes the children's SSE.
  const double parent_score = sum * sum / total_n;
  double best_score = parent_score + 1e-12 * std::max(1.0, std::abs(parent_score));
  int best_gene = -1;
  int best_threshold = 0;
  std::vector<double> bin_sum;
  std::vector<std::size_t> bin_n;
  for (std::size_t g = 0; g < counts_.size(); ++g) {
    bin_sum.assign(counts_[g], 0.0);
    bin_n.assign(counts_[g], 0);
    for (std::size_t r : rows) {
      const auto v = static_cast<std::size_t>(data.x[r].genome[g]);
      bin_sum[v] += data.y[r];
      ++bin_n[v];
    }
    double left_sum = 0;
    std::size_t left_n = 0;
    for (std::size_t t = 0; t + 1 < counts_[g]; ++t) {
      left_sum += bin_sum[t];
      left_n += bin_n[t];
      if (bin_n[t] == 0 || left_n == rows.size()) continue;
      if (left_n == 0) continue;
      const double right_sum = sum - left_sum;
      const double right_n = total_n - static_cast<double>(left_n);
      const double score =
          left_sum * left_sum / static_cast<double>(left_n) + right_sum * right_sum / right_n;
      if (score > best_score) {
        best_score = score;
        best_gene = static_cast<int>(g);
        best_threshold = static_cast<int>(t);
      }
    }
  }
  if (best_gene < 0) return id;

  std::vector<std::size_t> left, right;
  for (std::size_t r : rows)
    (data.x[r].genome[static_cast<std::size_t>(best_gene)] <= best_threshold ? left : right)
        .push_back(r);
  rows.clear();
  rows.shrink_to_fit();
  const int l = grow(tree, data, left, depth + 1);
  const int rr = grow(tree, data, right, depth + 1);
  Node& node = tree[static_cast<std::size_t>(id)];
  node.gene = best_gene;
  node.threshold = best_threshold;
  node.left = l;
  node.right = rr;
  return id;
}

void BaggedTrees::fit(const Dataset& data, Rng& rng) {
  check_dataset(data);
  trees_.clear();
  const std::size_t n = data.x.size();
  for (std::size_t t = 0; t < n_trees_; ++t) {
    std::vector<std::size_t> rows(n);
    for (std::size_t i = 0; i < n; ++i) rows[i] = rng.below(n);
    Tree tree;
    grow(tree, data, rows, 0);
    trees_.push_back(std::move(tree));
  }
}

double BaggedTrees::predict(const AcceleratorConfig& config) const {
  double s = 0;
  for (const Tree& tree : trees_) {
    std::size_t i = 0;
    while (tree[i].gene >= 0) {
      const Node& node = tree[i];
      i = static_cast<std::size_t>(
          config.genome[static_cast<std::size_t>(node.gene)] <= node.threshold ? node.left
                                                                                : node.right);
    }
    s += tree[i].value;
  }
  return s / static_cast<double>(trees_.size());
}

double cv_r2(const std::function<std::unique_ptr<Regressor>()>& make, const Dataset& data,
             std::size_t folds, Rng& rng) {
  check_dataset(data);
  const std::size_t n = data.x.size();
  if (folds < 2 || n < folds) throw ValidationError("cv_r2: need at least `folds` >= 2 points");
  const double y_mean = mean_of(data.y);
  double sst = 0;
  for (double v : data.y) sst += (v - y_mean) * (v - y_mean);
  if (sst <= 0) return 0.0;

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);

  double sse = 0;
  for (std::size_t f = 0; f < folds; ++f) {
    Dataset train, test;
    for (std::size_t i = 0; i < n; ++i) {
      Dataset& dst = (i % folds == f) ? test : train;
      dst.x.push_back(data.x[perm[i]]);
      dst.y.push_back(data.y[perm[i]]);
    }
    auto model = make();
    model->fit(train, rng);
    for (std::size_t i = 0; i < test.x.size(); ++i) {
      const double e = model->predict(test.x[i]) - test.y[i];
      sse += e * e;
    }
  }
  return 1.0 - sse / sst;
}

Ensemble select_models(const SearchSpace& space, const Dataset& data, Rng& rng,
                       const ModelSelectionOptions& options) {
  check_dataset(data);
  using Factory = std::function<std::unique_ptr<Regressor>()>;
  struct Family {
    std::vector<Factory> grid;
  };
  std::vector<Family> families(3);
  for (std::size_t k : {3, 5, 7})
    families[0].grid.push_back([&space, k] { return std::make_unique<KnnRegressor>(space, k); });
  for (double lambda : {0.1, 1.0, 10.0})
    families[1].grid.push_back(
        [&space, lambda] { return std::make_unique<RidgeRegressor>(space, lambda); });
  for (std::size_t t : {25, 50})
    families[2].grid.push_back([&space, t] { return std::make_unique<BaggedTrees>(space, t); });

  struct Candidate {
    Factory make;
    double score;
  };
  std::vector<Candidate> best;
  for (const Family& fam : families) {
    std::map<std::size_t, double> scored;
    for (std::size_t d = 0; d < options.random_draws; ++d) {
      const std::size_t pick = rng.below(fam.grid.size());
      if (scored.contains(pick)) continue;
      scored[pick] = cv_r2(fam.grid[pick], data, options.folds, rng);
    }
    auto it = std::max_element(scored.begin(), scored.end(),
                               [](const auto& a, const auto& b) { return a.second < b.second; });
    best.push_back({fam.grid[it->first], it->second});
  }

  Ensemble out;
  for (const Candidate& c : best) {
    if (c.score < options.threshold) continue;
    out.members.push_back(c.make());
    out.cv_scores.push_back(c.score);
  }
  if (out.members.empty()) {
    const auto it = std::max_element(best.begin(), best.end(),
                                     [](const auto& a, const auto& b) { return a.score < b.score; });
    out.members.push_back(it->make());
    out.cv_scores.push_back(it->score);
    out.fallback = true;
  }
  for (auto& m : out.members) m->fit(data, rng);
  return out;
}

double mbo_acquisition(const Ensemble& ensemble, const AcceleratorConfig& config, double beta) {
  if (ensemble.members.empty()) throw ValidationError("mbo_acquisition: empty ensemble");
  std::vector<double> p;
  p.reserve(ensemble.members.size());
  for (const auto& m : ensemble.members) p.push_back(m->predict(config));
  const double mu = mean_of(p);
  double var = 0;
  for (double v : p) var += (v - mu) * (v - mu);
  var /= static_cast<double>(p.size());
  return mu + beta * std::sqrt(var);
}

}  // namespace dse
