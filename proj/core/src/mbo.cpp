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

#include "dse/mbo.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <unordered_set>

#include "dse/error.hpp"
#include "dse/evolution.hpp"

namespace dse {

void MboParams::validate() const {
  if (beta < 0) throw ValidationError("mbo: beta must be >= 0");
  if (min_history < selection.folds) throw ValidationError("mbo: min_history must be >= cv folds");
  if (refit_every < 1) throw ValidationError("mbo: refit_every must be >= 1");
  if (max_train < min_history) throw ValidationError("mbo: max_train must be >= min_history");
  if (inner_population < 2) throw ValidationError("mbo: inner_population must be >= 2");
  if (selection.folds < 2) throw ValidationError("mbo: cv folds must be >= 2");
  if (selection.random_draws < 1) throw ValidationError("mbo: random_draws must be >= 1");
}

MboParams MboParams::from_json(const nlohmann::json& j) {
  MboParams p;
  p.beta = j.value("beta", p.beta);
  p.min_history = j.value("min_history", p.min_history);
  p.refit_every = j.value("refit_every", p.refit_every);
  p.max_train = j.value("max_train", p.max_train);
  p.inner_population = j.value("inner_population", p.inner_population);
  p.inner_generations = j.value("inner_generations", p.inner_generations);
  p.inner_seeds = j.value("inner_seeds", p.inner_seeds);
  p.selection.folds = j.value("cv_folds", p.selection.folds);
  p.selection.random_draws = j.value("random_draws", p.selection.random_draws);
  p.selection.threshold = j.value("cv_threshold", p.selection.threshold);
  p.validate();
  return p;
}

nlohmann::json MboParams::to_json() const {
  return {{"beta", beta},
          {"min_history", min_history},
          {"refit_every", refit_every},
          {"max_train", max_train},
          {"inner_population", inner_population},
          {"inner_generations", inner_generations},
          {"inner_seeds", inner_seeds},
          {"cv_folds", selection.folds},
          {"random_draws", selection.random_draws},
          {"cv_threshold", selection.threshold}};
}

ModelBasedOptimizer::ModelBasedOptimizer(SearchSpace space, std::uint64_t seed, MboParams params)
    : Optimizer(std::move(space), seed), params_(params) {
  params_.validate();
}

void ModelBasedOptimizer::observe(std::span<const TrialRecord> records) {
  for (const auto& r : records) {
    auto [it, inserted] = data_index_.try_emplace(space().rank(r.config), data_x_.size());
    if (inserted) {
      data_x_.push_back(r.config);
      data_y_.push_back(r.reward);
      data_seen_.push_back(tell_counter_);
    } else {
      data_y_[it->second] = r.reward;
      data_seen_[it->second] = tell_counter_;
    }
    ++tell_counter_;
    ++tells_since_refit_;
  }
}

void ModelBasedOptimizer::refit() {
  std::vector<std::size_t> idx(data_x_.size());
  std::iota(idx.begin(), idx.end(), 0);
  if (idx.size() > params_.max_train) {
    std::vector<std::size_t> by_reward = idx;
    std::stable_sort(by_reward.begin(), by_reward.end(),
                     [&](std::size_t a, std::size_t b) { return data_y_[a] > data_y_[b]; });
    std::vector<char> chosen(idx.size(), 0);
    std::vector<std::size_t> keep(by_reward.begin(),
                                  by_reward.begin() + static_cast<std::ptrdiff_t>(params_.max_train / 2));
    for (std::size_t i : keep) chosen[i] = 1;
    std::vector<std::size_t> by_recency = idx;
    std::stable_sort(by_recency.begin(), by_recency.end(),
                     [&](std::size_t a, std::size_t b) { return data_seen_[a] > data_seen_[b]; });
    for (std::size_t i : by_recency) {
      if (keep.size() >= params_.max_train) break;
      if (!chosen[i]) keep.push_back(i);
    }
    std::sort(keep.begin(), keep.end());
    idx = std::move(keep);
  }
  Dataset data;
  for (std::size_t i : idx) {
    data.x.push_back(data_x_[i]);
    data.y.push_back(data_y_[i]);
  }
  ensemble_ = select_models(space(), data, rng(), params_.selection);
  acq_cache_.clear();
  tells_since_refit_ = 0;
}

double ModelBasedOptimizer::acquisition(const AcceleratorConfig& config) {
  const auto key = space().rank(config);
  if (auto it = acq_cache_.find(key); it != acq_cache_.end()) return it->second;
  const double v = mbo_acquisition(*ensemble_, config, params_.beta);
  acq_cache_.emplace(key, v);
  return v;
}

std::vector<AcceleratorConfig> ModelBasedOptimizer::propose(std::size_t n) {
  std::vector<AcceleratorConfig> out;
  const bool flat = std::adjacent_find(data_y_.begin(), data_y_.end(),
                                       std::not_equal_to<>()) == data_y_.end();
  if (data_x_.size() < params_.min_history || flat) {
    for (std::size_t i = 0; i < n; ++i) out.push_back(space().sample_uniform(rng()));
    return out;
  }
  if (!ensemble_ || tells_since_refit_ >= params_.refit_every) refit();

  struct Cand {
    AcceleratorConfig config;
    double acq;
    std::uint64_t rank;
  };
  auto make = [&](AcceleratorConfig c) {
    const double a = acquisition(c);
    const auto r = space().rank(c);
    return Cand{std::move(c), a, r};
  };
  auto better = [](const Cand& a, const Cand& b) {
    return a.acq != b.acq ? a.acq > b.acq : a.rank < b.rank;
  };

  std::vector<std::size_t> order(data_x_.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return data_y_[a] > data_y_[b]; });
  std::vector<Cand> pop;
  for (std::size_t i = 0; i < std::min(params_.inner_seeds, order.size()); ++i)
    pop.push_back(make(data_x_[order[i]]));
  const double gene_rate = 1.0 / static_cast<double>(space().num_params());
  while (pop.size() < params_.inner_population) {
    const auto& parent = pop[rng().below(pop.size())].config;
    pop.push_back(make(space().mutate_gene(parent, rng().below(space().num_params()), rng())));
  }

  auto tournament = [&]() -> const Cand& {
    const Cand& a = pop[rng().below(pop.size())];
    const Cand& b = pop[rng().below(pop.size())];
    return better(b, a) ? b : a;
  };
  std::unordered_set<std::uint64_t> seen;
  for (std::size_t gen = 0; gen < params_.inner_generations; ++gen) {
    std::vector<Cand> next = pop;
    for (std::size_t i = 0; i < params_.inner_population; ++i) {
      auto child = crossover(tournament().config, tournament().config, 0.5, rng());
      child = mutate(child, gene_rate, space(), rng());
      next.push_back(make(std::move(child)));
    }
    std::sort(next.begin(), next.end(), better);
    seen.clear();
    pop.clear();
    for (auto& c : next) {
      if (pop.size() >= params_.inner_population) break;
      if (seen.insert(c.rank).second) pop.push_back(std::move(c));
    }
  }

  for (auto& c : pop) {
    if (out.size() >= n) break;
    if (!pending_contains(c.rank)) out.push_back(std::move(c.config));
  }
  while (out.size() < n) out.push_back(space().sample_uniform(rng()));
  return out;
}

std::unique_ptr<Optimizer> ModelBasedOptimizer::spawn_perturbed(Rng& rng, std::uint64_t seed) const {
  MboParams p = params_;
  p.beta = perturb(std::max(p.beta, 1e-3), 0.0, 10.0, rng);
  return std::make_unique<ModelBasedOptimizer>(space(), seed, p);
}

}  // namespace dse
