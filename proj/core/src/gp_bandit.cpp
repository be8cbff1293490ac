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

#include "dse/gp_bandit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dse/acquisition.hpp"
#include "dse/error.hpp"

namespace dse {

void GpBanditParams::validate() const {
  if (xi < 0) throw ValidationError("gp_bandit: xi must be >= 0");
  if (restarts < 1) throw ValidationError("gp_bandit: restarts must be >= 1");
  if (n_init < 2) throw ValidationError("gp_bandit: n_init must be >= 2");
  if (max_points < 4) throw ValidationError("gp_bandit: max_points must be >= 4");
  if (refit_every < 1) throw ValidationError("gp_bandit: refit_every must be >= 1");
}

GpBanditParams GpBanditParams::from_json(const nlohmann::json& j) {
  GpBanditParams p;
  p.xi = j.value("xi", p.xi);
  p.restarts = j.value("restarts", p.restarts);
  p.incumbent_starts = j.value("incumbent_starts", p.incumbent_starts);
  p.n_init = j.value("n_init", p.n_init);
  p.max_points = j.value("max_points", p.max_points);
  p.refit_every = j.value("refit_every", p.refit_every);
  p.validate();
  return p;
}

nlohmann::json GpBanditParams::to_json() const {
  return {{"xi", xi},
          {"restarts", restarts},
          {"incumbent_starts", incumbent_starts},
          {"n_init", n_init},
          {"max_points", max_points},
          {"refit_every", refit_every}};
}

GpBandit::GpBandit(SearchSpace space, std::uint64_t seed, GpBanditParams params)
    : Optimizer(std::move(space), seed), params_(params) {
  params_.validate();
  // One-hot blocks contribute 2 per differing gene, numeric coordinates
  // (delta / (count - 1))^2.
  for (const auto& p : this->space().params()) {
    const std::size_t c = p.size();
    std::vector<double> table(c * c, 0.0);
    for (std::size_t i = 0; i < c; ++i)
      for (std::size_t j = 0; j < c; ++j) {
        if (i == j) continue;
        const double d =
            (static_cast<double>(i) - static_cast<double>(j)) / static_cast<double>(c - 1);
        table[i * c + j] = 2.0 + d * d;
      }
    gene_sq_.push_back(std::move(table));
  }
}

double GpBandit::sq_distance(const AcceleratorConfig& a, const AcceleratorConfig& b) const {
  double s = 0;
  for (std::size_t g = 0; g < gene_sq_.size(); ++g) {
    const std::size_t c = space().param(g).size();
    s += gene_sq_[g][static_cast<std::size_t>(a.genome[g]) * c + static_cast<std::size_t>(b.genome[g])];
  }
  return s;
}

Eigen::VectorXd GpBandit::sq_to(const std::vector<AcceleratorConfig>& set,
                                const AcceleratorConfig& c) const {
  Eigen::VectorXd d(static_cast<Eigen::Index>(set.size()));
  for (std::size_t i = 0; i < set.size(); ++i) d(static_cast<Eigen::Index>(i)) = sq_distance(set[i], c);
  return d;
}

Eigen::MatrixXd GpBandit::pairwise(const std::vector<AcceleratorConfig>& set) const {
  const auto n = static_cast<Eigen::Index>(set.size());
  Eigen::MatrixXd d(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    d(i, i) = 0;
    for (Eigen::Index j = i + 1; j < n; ++j)
      d(i, j) = d(j, i) = sq_distance(set[static_cast<std::size_t>(i)], set[static_cast<std::size_t>(j)]);
  }
  return d;
}

void GpBandit::observe(std::span<const TrialRecord> records) {
  for (const auto& r : records) {
    const auto key = space().rank(r.config);
    auto [it, inserted] = data_index_.try_emplace(key, data_x_.size());
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
  dirty_ = true;
}

std::vector<std::size_t> GpBandit::training_subset() const {
  std::vector<std::size_t> idx(data_x_.size());
  std::iota(idx.begin(), idx.end(), 0);
  if (idx.size() <= params_.max_points) return idx;
  std::vector<std::size_t> by_reward = idx;
  std::stable_sort(by_reward.begin(), by_reward.end(),
                   [&](std::size_t a, std::size_t b) { return data_y_[a] > data_y_[b]; });
  std::vector<char> chosen(idx.size(), 0);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < params_.max_points / 2; ++i) {
    chosen[by_reward[i]] = 1;
    out.push_back(by_reward[i]);
  }
  std::vector<std::size_t> by_recency = idx;
  std::stable_sort(by_recency.begin(), by_recency.end(),
                   [&](std::size_t a, std::size_t b) { return data_seen_[a] > data_seen_[b]; });
  for (std::size_t i : by_recency) {
    if (out.size() >= params_.max_points) break;
    if (!chosen[i]) out.push_back(i);
  }
  std::sort(out.begin(), out.end());
  return out;
}

void GpBandit::fit_target(const std::vector<AcceleratorConfig>& extra_x,
                          const std::vector<double>& extra_y) {
  const auto subset = training_subset();
  fit_x_.clear();
  std::vector<double> ys;
  for (std::size_t i : subset) {
    fit_x_.push_back(data_x_[i]);
    ys.push_back(data_y_[i]);
  }
  fit_x_.insert(fit_x_.end(), extra_x.begin(), extra_x.end());
  ys.insert(ys.end(), extra_y.begin(), extra_y.end());
  if (fit_x_.empty()) {
    model_.clear_target();
    return;
  }
  Eigen::VectorXd y = Eigen::Map<Eigen::VectorXd>(ys.data(), static_cast<Eigen::Index>(ys.size()));
  Eigen::VectorXd base_means = Eigen::VectorXd::Zero(y.size());
  if (model_.has_base())
    for (std::size_t i = 0; i < fit_x_.size(); ++i)
      base_means(static_cast<Eigen::Index>(i)) = model_.base_mean(sq_to(base_x_, fit_x_[i]));
  const Eigen::MatrixXd d = pairwise(fit_x_);
  if (!hyper_ || tells_since_refit_ >= params_.refit_every) {
    model_.fit_target(d, y, base_means);
    hyper_ = model_.target()->hyper();
    tells_since_refit_ = 0;
  } else {
    model_.fit_target_fixed(d, y, base_means, *hyper_);
  }
}

GpPrediction GpBandit::posterior(const AcceleratorConfig& c) const {
  const Eigen::VectorXd to_base = model_.has_base() ? sq_to(base_x_, c) : Eigen::VectorXd();
  const Eigen::VectorXd to_target = model_.has_target() ? sq_to(fit_x_, c) : Eigen::VectorXd();
  return model_.predict_sq(to_base, to_target);
}

GpPrediction GpBandit::predict(const AcceleratorConfig& config) {
  if (dirty_) {
    fit_target({}, {});
    dirty_ = false;
  }
  return posterior(config);
}

std::vector<AcceleratorConfig> GpBandit::propose(std::size_t n) {
  std::vector<AcceleratorConfig> out;
  if (!model_.has_base() && data_x_.size() < params_.n_init) {
    for (std::size_t i = 0; i < n; ++i) out.push_back(fresh_sample());
    return out;
  }

  // Constant liar: pending trials enter at the posterior mean of the model
  // without them.
  fit_target({}, {});
  dirty_ = false;
  std::vector<AcceleratorConfig> liar_x = pending_configs();
  std::vector<double> liar_y;
  for (const auto& c : liar_x) liar_y.push_back(posterior(c).mean);
  if (!liar_x.empty()) {
    fit_target(liar_x, liar_y);
    dirty_ = true;
  }

  double best = data_y_.empty() ? base_best_ : *std::max_element(data_y_.begin(), data_y_.end());
  const auto starts = incumbents();
  for (std::size_t i = 0; i < n; ++i) {
    std::unordered_map<std::uint64_t, double> cache;
    auto acquisition = [&](const AcceleratorConfig& c) {
      const auto key = space().rank(c);
      if (auto it = cache.find(key); it != cache.end()) return it->second;
      // The objective is deterministic; re-evaluating a design gains nothing.
      if (data_index_.contains(key)) return -1.0;
      const auto p = posterior(c);
      const double ei = expected_improvement(p.mean, std::sqrt(p.variance), best, params_.xi);
      cache.emplace(key, ei);
      return ei;
    };
    double pick_value = 0;
    auto pick = hill_climb(acquisition, space(), params_.restarts, rng());
    pick_value = acquisition(pick);
    for (const auto& start : starts) {
      double value = 0;
      auto local = hill_climb_from(acquisition, space(), start, &value);
      if (value > pick_value) {
        pick = std::move(local);
        pick_value = value;
      }
    }
    // Every climb ended on an evaluated design: fall back to a fresh one.
    if (data_index_.contains(space().rank(pick))) pick = fresh_sample();
    if (i + 1 < n) {
      liar_x.push_back(pick);
      liar_y.push_back(posterior(pick).mean);
      fit_target(liar_x, liar_y);
      dirty_ = true;
    }
    out.push_back(std::move(pick));
  }
  return out;
}

// Uniform sample, retried a bounded number of times to avoid evaluated designs.
AcceleratorConfig GpBandit::fresh_sample() {
  AcceleratorConfig c = space().sample_uniform(rng());
  for (int tries = 0; tries < 256 && data_index_.contains(space().rank(c)); ++tries)
    c = space().sample_uniform(rng());
  return c;
}

// Best observed configs, target data first, then source seeds.
std::vector<AcceleratorConfig> GpBandit::incumbents() const {
  std::vector<AcceleratorConfig> out;
  auto take = [&](const std::vector<AcceleratorConfig>& xs, const std::vector<double>& ys) {
    std::vector<std::size_t> idx(xs.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return ys[a] > ys[b]; });
    for (std::size_t i : idx) {
      if (out.size() >= params_.incumbent_starts || ys[i] <= 0) break;
      out.push_back(xs[i]);
    }
  };
  take(data_x_, data_y_);
  take(base_x_, base_y_);
  return out;
}

void GpBandit::warm_start(std::span<const TrialRecord> seeds) {
  if (seeds.empty()) return;
  std::unordered_map<std::uint64_t, std::size_t> seen;
  std::vector<double> ys;
  base_x_.clear();
  for (const auto& r : seeds) {
    space().check(r.config);
    auto [it, inserted] = seen.try_emplace(space().rank(r.config), base_x_.size());
    if (inserted) {
      base_x_.push_back(r.config);
      ys.push_back(r.reward);
    } else {
      ys[it->second] = r.reward;
    }
  }
  Eigen::VectorXd y = Eigen::Map<Eigen::VectorXd>(ys.data(), static_cast<Eigen::Index>(ys.size()));
  model_.fit_base(pairwise(base_x_), y);
  base_y_ = ys;
  base_best_ = y.maxCoeff();
  hyper_.reset();
  dirty_ = true;
}

std::unique_ptr<Optimizer> GpBandit::spawn_perturbed(Rng& rng, std::uint64_t seed) const {
  GpBanditParams p = params_;
  p.xi = perturb(std::max(p.xi, 1e-4), 0.0, 1.0, rng);
  return std::make_unique<GpBandit>(space(), seed, p);
}

}  // namespace dse
